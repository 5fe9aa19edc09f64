#pragma once

// Pipelines behind the command-line driver: configured runs with report
// artifacts and a hashed manifest, plus the self-contained verify suites.
//
// Exit-code contract: 0 pass, 1 acceptance failure, 2 configuration error,
// 3 numerical failure (NaN).

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "csf/evolve.hpp"

namespace csf {

inline constexpr int kExitPass = 0;
inline constexpr int kExitAcceptance = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct StageFailure : std::runtime_error {
  std::string stage;
  StageFailure(const std::string& st, const std::string& m)
      : std::runtime_error(st + ": " + m), stage(st) {}
};
struct SuiteFailure : std::runtime_error {
  explicit SuiteFailure(const std::string& m) : std::runtime_error(m) {}
};

// FNV-1a content hash used in run manifests.
std::uint64_t fnv1a(const std::string& bytes);
std::string file_hash_hex(const std::string& path);

// Output directory: explicit flag wins, then CSF_OUTPUT_DIR, then cwd.
std::string resolve_output_dir(const std::string& flag);

struct RunOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value, applied in order
  std::string out_dir;                 // after resolve_output_dir
  int threads = 0;                     // 0 = library default
};

// Executes init -> evolve -> energy -> peel -> ratios -> identities and
// writes monitors/energy/peel/ratio report files plus manifest.txt.
// Returns an exit code per the contract above.
int cmd_run(const RunOptions& opt, std::ostream& log);

// suite in {geometry, identities, inequalities, convergence}; h/h2 are the
// refinement pair for the order measurements.
int cmd_verify(const std::string& suite, double h, double h2,
               std::ostream& log);

// Re-reads monitors.txt from a run directory and re-checks the acceptance
// thresholds.
int cmd_report(const std::string& dir, std::ostream& log);

}  // namespace csf
