#include "blockoff/harness.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

extern char** environ;

namespace blockoff {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(MeasureStatus s)
{
    switch (s) {
    case MeasureStatus::Ok: return "Ok";
    case MeasureStatus::CompileError: return "CompileError";
    case MeasureStatus::RunError: return "RunError";
    case MeasureStatus::ValidationFail: return "ValidationFail";
    case MeasureStatus::Timeout: return "Timeout";
    }
    return "?";
}

double lower_median(std::vector<double> xs)
{
    if (xs.empty()) throw std::invalid_argument("median of empty sample");
    std::sort(xs.begin(), xs.end());
    return xs[(xs.size() - 1) / 2];
}

// ---- profiles ---------------------------------------------------------

namespace {

std::size_t occurrences(const std::vector<std::string>& argv, std::string_view placeholder)
{
    std::size_t n = 0;
    for (const auto& a : argv)
        for (auto pos = a.find(placeholder); pos != std::string::npos; pos = a.find(placeholder, pos + 1)) ++n;
    return n;
}

std::vector<std::string> string_list(const json& v, const std::string& where)
{
    if (!v.is_array() || v.empty()) throw ProfileError(where + ": expected a non-empty array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw ProfileError(where + ": expected a non-empty array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

}  // namespace

std::map<std::string, BackendProfile> parse_profiles(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ProfileError(std::string("profiles: ") + e.what());
    }
    if (!doc.is_object()) throw ProfileError("profiles: expected an object keyed by profile name");

    std::map<std::string, BackendProfile> out;
    for (const auto& [name, body] : doc.items()) {
        if (!body.is_object()) throw ProfileError("profile '" + name + "': expected an object");
        for (const auto& [k, v] : body.items())
            if (k != "compile_cmd" && k != "run_cmd" && k != "env" && k != "timeout_s")
                throw ProfileError("profile '" + name + "': unknown key '" + k + "'");
        BackendProfile p;
        p.name = name;
        if (!body.contains("compile_cmd")) throw ProfileError("profile '" + name + "': missing compile_cmd");
        if (!body.contains("run_cmd")) throw ProfileError("profile '" + name + "': missing run_cmd");
        p.compile_cmd = string_list(body["compile_cmd"], "profile '" + name + "'.compile_cmd");
        p.run_cmd = string_list(body["run_cmd"], "profile '" + name + "'.run_cmd");
        if (body.contains("env")) {
            if (!body["env"].is_object()) throw ProfileError("profile '" + name + "'.env: expected an object");
            for (const auto& [k, v] : body["env"].items()) {
                if (!v.is_string()) throw ProfileError("profile '" + name + "'.env." + k + ": expected a string");
                p.env[k] = v.get<std::string>();
            }
        }
        if (body.contains("timeout_s")) {
            if (!body["timeout_s"].is_number() || body["timeout_s"].get<double>() <= 0)
                throw ProfileError("profile '" + name + "'.timeout_s: expected a positive number");
            p.timeout_s = body["timeout_s"].get<double>();
        }
        if (occurrences(p.compile_cmd, "{{src}}") != 1 || occurrences(p.compile_cmd, "{{out}}") != 1)
            throw ProfileError("profile '" + name + "': compile_cmd must contain {{src}} and {{out}} exactly once");
        if (occurrences(p.run_cmd, "{{bin}}") != 1)
            throw ProfileError("profile '" + name + "': run_cmd must contain {{bin}} exactly once");
        out.emplace(name, std::move(p));
    }
    return out;
}

std::map<std::string, BackendProfile> load_profiles(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ProfileError("cannot read profiles file " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_profiles(ss.str());
}

// ---- validation -------------------------------------------------------

namespace {

struct Segment {
    bool number;
    std::string text;
    double value;
};

// Splits a whitespace-delimited token into text and numeric segments.
std::vector<Segment> segments(const std::string& token)
{
    static const std::regex number(R"([-+]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?|[-+]?(?:inf|nan))");
    std::vector<Segment> out;
    std::size_t pos = 0;
    while (pos < token.size()) {
        std::smatch m;
        const std::string rest = token.substr(pos);
        const bool boundary = pos == 0 || !(std::isalnum(static_cast<unsigned char>(token[pos - 1])) ||
                                            token[pos - 1] == '_');
        if (boundary && std::regex_search(rest, m, number, std::regex_constants::match_continuous)) {
            out.push_back({true, m.str(), std::strtod(m.str().c_str(), nullptr)});
            pos += static_cast<std::size_t>(m.length());
            continue;
        }
        if (out.empty() || out.back().number) out.push_back({false, {}, 0.0});
        out.back().text += token[pos++];
    }
    return out;
}

std::vector<std::string> words(std::string_view s)
{
    std::istringstream in{std::string(s)};
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

bool close_enough(double a, double b, double tol)
{
    if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
    if (a == b) return true;
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= tol * scale;
}

}  // namespace

std::string Validator::check(std::string_view actual) const
{
    if (!expected) return "no reference output to validate against";
    const auto want = words(*expected);
    const auto got = words(actual);
    if (want.size() != got.size())
        return "expected " + std::to_string(want.size()) + " output tokens, got " + std::to_string(got.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        const auto a = segments(want[i]);
        const auto b = segments(got[i]);
        bool same = a.size() == b.size();
        for (std::size_t k = 0; same && k < a.size(); ++k) {
            if (a[k].number != b[k].number)
                same = false;
            else if (a[k].number)
                same = close_enough(a[k].value, b[k].value, tolerance);
            else
                same = a[k].text == b[k].text;
        }
        if (!same) return "output token " + std::to_string(i) + ": expected '" + want[i] + "', got '" + got[i] + "'";
    }
    return {};
}

// ---- process execution ------------------------------------------------

ExecResult ProcessExecutor::run(const ExecRequest& req)
{
    ExecResult res;
    if (req.argv.empty()) throw std::invalid_argument("empty command");

    int out_pipe[2];
    int err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) throw std::runtime_error("pipe() failed");

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err_pipe[1], STDERR_FILENO);
    posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
    posix_spawn_file_actions_addclose(&actions, err_pipe[0]);
    posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);

    std::vector<std::string> env_strings;
    for (char** e = environ; *e != nullptr; ++e) {
        const std::string entry(*e);
        const auto key = entry.substr(0, entry.find('='));
        if (!req.env.count(key)) env_strings.push_back(entry);
    }
    for (const auto& [k, v] : req.env) env_strings.push_back(k + "=" + v);
    std::vector<char*> envp;
    for (auto& s : env_strings) envp.push_back(s.data());
    envp.push_back(nullptr);

    std::vector<std::string> argv_storage = req.argv;
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());
    argv.push_back(nullptr);

    const auto old_cwd = fs::current_path();
    if (!req.cwd.empty()) fs::current_path(req.cwd);
    const auto start = std::chrono::steady_clock::now();
    pid_t pid = 0;
    const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), envp.data());
    if (!req.cwd.empty()) fs::current_path(old_cwd);
    posix_spawn_file_actions_destroy(&actions);
    close(out_pipe[1]);
    close(err_pipe[1]);

    if (rc != 0) {
        close(out_pipe[0]);
        close(err_pipe[0]);
        res.exit_code = 127;
        res.stderr_text = "failed to execute '" + req.argv[0] + "': " + std::strerror(rc) + "\n";
        return res;
    }

    const auto deadline = start + std::chrono::duration<double>(req.timeout_s);
    pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    std::string* sinks[2] = {&res.stdout_text, &res.stderr_text};
    int open_fds = 2;
    char buf[4096];
    while (open_fds > 0) {
        const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                                   deadline - std::chrono::steady_clock::now())
                                   .count();
        if (remaining <= 0) {
            res.timed_out = true;
            kill(pid, SIGKILL);
            break;
        }
        const int n = poll(fds, 2, static_cast<int>(std::min<long long>(remaining, 1000)));
        if (n < 0 && errno != EINTR) break;
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            const auto got = read(fds[i].fd, buf, sizeof buf);
            if (got > 0) {
                sinks[i]->append(buf, static_cast<std::size_t>(got));
            } else {
                close(fds[i].fd);
                fds[i].fd = -1;
                --open_fds;
            }
        }
    }
    for (auto& f : fds)
        if (f.fd >= 0) close(f.fd);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    res.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (WIFEXITED(status))
        res.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        res.exit_code = 128 + WTERMSIG(status);
    return res;
}

// ---- measurement ------------------------------------------------------

std::vector<std::string> expand_compile(const BackendProfile& profile, const std::vector<std::string>& sources,
                                        const std::string& out, const std::vector<std::string>& flags)
{
    std::vector<std::string> argv;
    for (const auto& a : profile.compile_cmd) {
        if (a == "{{src}}") {
            argv.insert(argv.end(), sources.begin(), sources.end());
        } else if (a == "{{flags}}") {
            argv.insert(argv.end(), flags.begin(), flags.end());
        } else {
            std::string s = a;
            for (const auto& [ph, val] : {std::pair<std::string, std::string>{"{{out}}", out}}) {
                for (auto pos = s.find(ph); pos != std::string::npos; pos = s.find(ph, pos + val.size()))
                    s.replace(pos, ph.size(), val);
            }
            argv.push_back(std::move(s));
        }
    }
    return argv;
}

namespace {

std::string join(const std::vector<std::string>& argv)
{
    std::string s;
    for (const auto& a : argv) {
        if (!s.empty()) s += ' ';
        s += a;
    }
    return s;
}

MeasurementResult measure_impl(const MeasureRequest& req, const BackendProfile& profile, Validator& validator,
                               bool capture_reference, Executor& exec)
{
    if (req.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    MeasurementResult res;
    res.pattern = req.pattern;

    const auto bin = fs::absolute(req.variant_dir / "prog").string();
    const auto compile_argv = expand_compile(profile, req.sources, bin, req.link_flags);
    res.log += "$ " + join(compile_argv) + "\n";
    const auto built = exec.run({compile_argv, profile.env, req.variant_dir, profile.timeout_s});
    res.log += built.stdout_text + built.stderr_text;
    if (built.timed_out || built.exit_code != 0) {
        res.status = MeasureStatus::CompileError;
        if (built.timed_out) res.log += "compile timed out\n";
        res.log += "compile command '" + compile_argv.front() + "' exited with " + std::to_string(built.exit_code) + "\n";
        return res;
    }

    std::vector<std::string> run_argv;
    for (const auto& a : profile.run_cmd) {
        std::string s = a;
        if (const auto pos = s.find("{{bin}}"); pos != std::string::npos) s.replace(pos, 7, bin);
        run_argv.push_back(std::move(s));
    }
    const bool reference_from_run = capture_reference && !validator.expected;
    for (int r = 0; r < req.repetitions; ++r) {
        const auto ran = exec.run({run_argv, profile.env, req.variant_dir, profile.timeout_s});
        if (r == 0) res.stdout_text = ran.stdout_text;
        if (ran.timed_out) {
            res.status = MeasureStatus::Timeout;
            res.log += "run " + std::to_string(r) + " exceeded " + std::to_string(profile.timeout_s) + " s\n";
            return res;
        }
        if (ran.exit_code != 0) {
            res.status = MeasureStatus::RunError;
            res.log += ran.stderr_text + "run " + std::to_string(r) + " exited with " +
                       std::to_string(ran.exit_code) + "\n";
            return res;
        }
        if (r == 0 && reference_from_run) validator.expected = ran.stdout_text;
        if (const auto why = validator.check(ran.stdout_text); !why.empty()) {
            res.status = MeasureStatus::ValidationFail;
            res.log += "run " + std::to_string(r) + " failed validation: " + why + "\n";
            return res;
        }
        res.times_s.push_back(ran.wall_s);
    }
    res.status = MeasureStatus::Ok;
    res.median_s = lower_median(res.times_s);
    return res;
}

}  // namespace

MeasurementResult measure(const MeasureRequest& req, const BackendProfile& profile, const Validator& validator,
                          Executor& exec)
{
    Validator v = validator;
    return measure_impl(req, profile, v, false, exec);
}

MeasurementResult measure_baseline(const MeasureRequest& req, const BackendProfile& profile, Validator& validator,
                                   Executor& exec)
{
    return measure_impl(req, profile, validator, true, exec);
}

}  // namespace blockoff
