#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "blockoff/detector.hpp"
#include "blockoff/harness.hpp"

namespace blockoff {

enum class ConfirmMode { Interactive, AssumeYes, AssumeNo };

std::string_view to_string(ConfirmMode m);

struct RunConfig {
    std::vector<std::filesystem::path> sources;
    std::filesystem::path db_root;
    std::filesystem::path profiles;
    double sigma = kDefaultSigma;
    int repetitions = kDefaultRepetitions;
    ConfirmMode mode = ConfirmMode::Interactive;
    std::filesystem::path out_dir = "out";
    /// Profile used for the all-CPU baseline.
    std::string baseline_profile = "cpu_baseline";
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitBaselineFailed = 2;
inline constexpr int kExitNoCandidates = 3;

struct Console {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    bool interactive;
};

/// Ask whether an interface-changing rewrite may proceed. A non-interactive
/// console in Interactive mode declines with a warning on `err`.
bool confirm_interface_change(const std::string& proposed_change, const std::vector<std::string>& notes,
                              ConfirmMode mode, const Console& console);

/// Prints the candidate table. Returns 0, 1 or 3.
int cmd_detect(const RunConfig& config, const Console& console);

/// Full pipeline; writes `<out_dir>/report.json`. Returns 0, 1, 2 or 3.
int cmd_search(const RunConfig& config, const Console& console, Executor& exec);
int cmd_search(const RunConfig& config, const Console& console);

/// Write to a sibling temporary file, then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace blockoff
