#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace blockoff {

inline constexpr int kDefaultRepetitions = 3;
inline constexpr double kDefaultTimeoutSeconds = 60.0;
inline constexpr double kDefaultTolerance = 1e-6;

/// Named compile/run command templates. Placeholders: {{src}} (expands to
/// every source file), {{out}}, {{flags}} (zero or more link flags) in
/// compile_cmd; {{bin}} in run_cmd.
struct BackendProfile {
    std::string name;
    std::vector<std::string> compile_cmd;
    std::vector<std::string> run_cmd;
    std::map<std::string, std::string> env;
    double timeout_s = kDefaultTimeoutSeconds;
};

class ProfileError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::map<std::string, BackendProfile> parse_profiles(std::string_view json_text);
std::map<std::string, BackendProfile> load_profiles(const std::filesystem::path& file);

/// Checks program stdout against a reference: numbers within a mixed
/// absolute/relative tolerance, every other token exactly.
struct Validator {
    /// nullopt means "match the baseline", filled in by measure_baseline.
    std::optional<std::string> expected;
    double tolerance = kDefaultTolerance;

    static Validator match_baseline() { return {}; }
    static Validator expect(std::string stdout_text) { return {std::move(stdout_text), kDefaultTolerance}; }

    /// Empty string when `actual` matches, otherwise the reason.
    std::string check(std::string_view actual) const;
};

enum class MeasureStatus { Ok, CompileError, RunError, ValidationFail, Timeout };

std::string_view to_string(MeasureStatus s);

struct MeasurementResult {
    std::string pattern;
    MeasureStatus status = MeasureStatus::Ok;
    std::vector<double> times_s;
    /// Lower-middle median of times_s; set only when status is Ok.
    std::optional<double> median_s;
    std::string log;
    /// stdout of the first run.
    std::string stdout_text;

    bool ok() const { return status == MeasureStatus::Ok; }
};

/// Sorted middle element; lower middle for even sizes.
double lower_median(std::vector<double> xs);

struct ExecRequest {
    std::vector<std::string> argv;
    std::map<std::string, std::string> env;
    std::filesystem::path cwd;
    double timeout_s = kDefaultTimeoutSeconds;
};

struct ExecResult {
    int exit_code = 0;
    bool timed_out = false;
    std::string stdout_text;
    std::string stderr_text;
    double wall_s = 0.0;
};

class Executor {
public:
    virtual ~Executor() = default;
    virtual ExecResult run(const ExecRequest& req) = 0;
};

/// Spawns real processes; wall time covers spawn to reap.
class ProcessExecutor final : public Executor {
public:
    ExecResult run(const ExecRequest& req) override;
};

struct MeasureRequest {
    std::filesystem::path variant_dir;
    /// Source file names relative to variant_dir.
    std::vector<std::string> sources;
    std::vector<std::string> link_flags;
    std::string pattern;
    int repetitions = kDefaultRepetitions;
};

/// Compile once, then run `repetitions` times sequentially, validating each
/// run's stdout.
MeasurementResult measure(const MeasureRequest& req, const BackendProfile& profile, const Validator& validator,
                          Executor& exec);

/// Like measure over the unmodified sources. When the validator has no
/// expected output, the first run's stdout becomes the reference and is
/// stored back into `validator`.
MeasurementResult measure_baseline(const MeasureRequest& req, const BackendProfile& profile, Validator& validator,
                                   Executor& exec);

/// Expanded compile argv (exposed for diagnostics and tests).
std::vector<std::string> expand_compile(const BackendProfile& profile, const std::vector<std::string>& sources,
                                        const std::string& out, const std::vector<std::string>& flags);

}  // namespace blockoff
