#include "blockoff/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "blockoff/frontend.hpp"
#include "blockoff/pattern_db.hpp"
#include "blockoff/search.hpp"
#include "blockoff/transformer.hpp"

namespace blockoff {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(ConfirmMode m)
{
    switch (m) {
    case ConfirmMode::Interactive: return "interactive";
    case ConfirmMode::AssumeYes: return "assume-yes";
    case ConfirmMode::AssumeNo: return "assume-no";
    }
    return "?";
}

bool confirm_interface_change(const std::string& proposed_change, const std::vector<std::string>& notes,
                              ConfirmMode mode, const Console& console)
{
    switch (mode) {
    case ConfirmMode::AssumeYes: return true;
    case ConfirmMode::AssumeNo: return false;
    case ConfirmMode::Interactive: break;
    }
    if (!console.interactive) {
        console.err << "warning: no terminal for confirmation; declining interface change\n";
        return false;
    }
    console.out << "Proposed change:\n  " << proposed_change << "\n";
    for (const auto& n : notes) console.out << "  note: " << n << "\n";
    for (;;) {
        console.out << "Apply this interface change? [y/n] " << std::flush;
        std::string line;
        if (!std::getline(console.in, line)) return false;
        const auto first = line.find_first_not_of(" \t\r");
        const char c = first == std::string::npos ? '\0' : static_cast<char>(std::tolower(line[first]));
        if (c == 'y') return true;
        if (c == 'n') return false;
    }
}

void write_file_atomic(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

struct Inputs {
    std::vector<SourceUnit> units;
    PatternDb db;
};

std::optional<Inputs> load_inputs(const RunConfig& config, const Console& console)
{
    if (config.sigma < 0.0 || config.sigma > 1.0) {
        console.err << "error: --sigma must be within [0, 1]\n";
        return std::nullopt;
    }
    if (config.repetitions < 1) {
        console.err << "error: --reps must be at least 1\n";
        return std::nullopt;
    }
    if (config.sources.empty()) {
        console.err << "error: no source files given\n";
        return std::nullopt;
    }
    Inputs in;
    try {
        for (const auto& p : config.sources) in.units.push_back(parse_file(p));
        in.db = PatternDb::load(config.db_root);
    } catch (const ParseError& e) {
        console.err << "error: " << e.what() << "\n";
        return std::nullopt;
    } catch (const DbError& e) {
        console.err << "error: " << e.what() << "\n";
        return std::nullopt;
    } catch (const std::exception& e) {
        console.err << "error: " << e.what() << "\n";
        return std::nullopt;
    }
    return in;
}

std::string location(const std::vector<SourceUnit>& units, const OffloadCandidate& c)
{
    const auto& u = units[c.unit_index];
    return u.path.filename().string() + ":" + std::to_string(u.line_of(c.site.start));
}

std::string format_score(double s)
{
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(3) << s;
    return ss.str();
}

void print_warnings(const Detection& d, const Console& console)
{
    for (const auto& w : d.warnings) console.err << "warning: record " << w.record_id << ": " << w.message << "\n";
}

json result_json(const MeasurementResult& r)
{
    json j;
    j["pattern"] = r.pattern;
    j["status"] = std::string(to_string(r.status));
    j["times_s"] = r.times_s;
    j["median_s"] = r.median_s ? json(*r.median_s) : json(nullptr);
    j["log"] = r.log;
    return j;
}

const char* source_name(ArgBinding::Source s)
{
    switch (s) {
    case ArgBinding::Source::Argument: return "argument";
    case ArgBinding::Source::DroppedOptional: return "dropped_optional";
    case ArgBinding::Source::DefaultedOptional: return "defaulted_optional";
    case ArgBinding::Source::Missing: return "missing";
    }
    return "?";
}

json binding_json(const InterfaceBinding& b)
{
    json args = json::array();
    for (const auto& a : b.arg_map) {
        json e;
        e["source"] = source_name(a.source);
        if (a.cast)
            e["cast"] = {{"from", std::string(to_string(a.cast->from))}, {"to", std::string(to_string(a.cast->to))}};
        args.push_back(e);
    }
    return {{"status", std::string(to_string(b.status))}, {"notes", b.notes}, {"arg_map", args}};
}

struct CandidateState {
    std::optional<std::size_t> searched_as;
    std::optional<std::string> excluded;
};

struct ConfirmationRecord {
    std::size_t candidate;
    std::string record_id;
    std::string proposed_change;
    std::vector<std::string> notes;
    bool approved;
};

struct RunRecord {
    std::string outcome;
    int exit_code = 0;
    const Detection* detection = nullptr;
    std::vector<CandidateState> states;
    std::vector<ConfirmationRecord> confirmations;
    std::vector<std::string> notes;
    std::optional<MeasurementResult> baseline;
    std::optional<SearchReport> search;
    std::vector<std::size_t> searched_to_detected;
};

json report_json(const RunConfig& config, const std::vector<SourceUnit>& units, const RunRecord& run)
{
    json j;
    j["outcome"] = run.outcome;
    j["exit_code"] = run.exit_code;
    json sources = json::array();
    for (const auto& s : config.sources) sources.push_back(s.string());
    j["config"] = {{"sources", sources},
                   {"db", config.db_root.string()},
                   {"profiles", config.profiles.string()},
                   {"sigma", config.sigma},
                   {"repetitions", config.repetitions},
                   {"confirmation_mode", std::string(to_string(config.mode))},
                   {"out", config.out_dir.string()}};

    json cands = json::array();
    json warnings = json::array();
    if (run.detection != nullptr) {
        for (const auto& c : run.detection->candidates) {
            json e;
            e["index"] = c.index;
            e["location"] = location(units, c);
            e["record_id"] = c.record_id;
            e["origin"] = std::string(to_string(c.origin));
            e["score"] = c.score;
            e["function"] = c.function_name.empty() ? json(nullptr) : json(c.function_name);
            e["replaces_body"] = c.replaces_body;
            e["binding"] = binding_json(c.binding);
            const auto& st = run.states.at(c.index);
            e["searched_as"] = st.searched_as ? json(*st.searched_as) : json(nullptr);
            e["excluded"] = st.excluded ? json(*st.excluded) : json(nullptr);
            cands.push_back(e);
        }
        for (const auto& w : run.detection->warnings)
            warnings.push_back({{"record_id", w.record_id}, {"message", w.message}});
        json overlaps = json::array();
        for (const auto& [a, b] : run.detection->overlaps) overlaps.push_back({a, b});
        j["overlaps"] = overlaps;
    }
    j["candidates"] = cands;
    j["warnings"] = warnings;

    json confirmations = json::array();
    for (const auto& c : run.confirmations)
        confirmations.push_back({{"candidate", c.candidate},
                                 {"record_id", c.record_id},
                                 {"proposed_change", c.proposed_change},
                                 {"notes", c.notes},
                                 {"approved", c.approved}});
    j["confirmations"] = confirmations;
    j["notes"] = run.notes;

    if (run.search) {
        const auto& s = *run.search;
        json singles = json::array();
        for (const auto& r : s.singles) singles.push_back(result_json(r));
        std::vector<std::size_t> selected;
        for (const auto i : s.selected.on_indices()) selected.push_back(run.searched_to_detected.at(i));
        j["search"] = {{"baseline", result_json(s.baseline)},
                       {"singles", singles},
                       {"combined", s.combined ? result_json(*s.combined) : json(nullptr)},
                       {"winners", s.winners},
                       {"dropped_from_combination", s.dropped_from_combination},
                       {"combination_rule_extrapolated", s.combination_extrapolated},
                       {"measurements", s.measurements},
                       {"selected", s.selected.str()},
                       {"selected_candidates", selected},
                       {"selected_median_s", s.selected_median_s},
                       {"speedup", s.speedup}};
    } else if (run.baseline) {
        j["search"] = {{"baseline", result_json(*run.baseline)}};
    } else {
        j["search"] = nullptr;
    }
    return j;
}

void write_report(const RunConfig& config, const std::vector<SourceUnit>& units, const RunRecord& run,
                  const Console& console)
{
    const auto path = config.out_dir / "report.json";
    try {
        write_file_atomic(path, report_json(config, units, run).dump(2) + "\n");
    } catch (const std::exception& e) {
        console.err << "error: cannot write report: " << e.what() << "\n";
    }
}

std::string proposed_change(const std::vector<SourceUnit>& units, const PatternRecord& rec,
                            const OffloadCandidate& c)
{
    std::string replacement;
    try {
        replacement = render_snippet(rec, c.binding, c.args, c.ret_target);
    } catch (const UnboundPlaceholder&) {
        replacement = rec.replacement.snippet;
    }
    std::string original(units[c.unit_index].text(c.site));
    if (c.replaces_body) original = "body of " + c.function_name;
    return location(units, c) + ": " + original + "  =>  " + replacement;
}

std::vector<std::string> link_flags_for(const std::vector<const PatternRecord*>& records)
{
    std::vector<std::string> flags;
    for (const auto* r : records)
        for (const auto& f : r->replacement.link_flags)
            if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
    return flags;
}

}  // namespace

int cmd_detect(const RunConfig& config, const Console& console)
{
    auto in = load_inputs(config, console);
    if (!in) return kExitInputError;
    const auto d = detect(in->units, in->db, config.sigma);
    print_warnings(d, console);
    if (d.candidates.empty()) {
        console.out << "no candidates\n";
        return kExitNoCandidates;
    }
    console.out << "index\tlocation\trecord\torigin\tscore\tbinding\n";
    for (const auto& c : d.candidates) {
        console.out << c.index << "\t" << location(in->units, c) << "\t" << c.record_id << "\t" << to_string(c.origin)
                    << "\t" << (c.origin == MatchOrigin::SimilarityMatch ? format_score(c.score) : "-") << "\t"
                    << to_string(c.binding.status) << "\n";
    }
    return kExitOk;
}

int cmd_search(const RunConfig& config, const Console& console)
{
    ProcessExecutor exec;
    return cmd_search(config, console, exec);
}

int cmd_search(const RunConfig& config, const Console& console, Executor& exec)
{
    auto in = load_inputs(config, console);
    if (!in) return kExitInputError;
    std::map<std::string, BackendProfile> profiles;
    try {
        profiles = load_profiles(config.profiles);
    } catch (const ProfileError& e) {
        console.err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    const auto base_profile = profiles.find(config.baseline_profile);
    if (base_profile == profiles.end()) {
        console.err << "error: profiles file has no '" << config.baseline_profile << "' profile\n";
        return kExitInputError;
    }

    const auto& units = in->units;
    const auto& db = in->db;
    const auto detection = detect(units, db, config.sigma);
    print_warnings(detection, console);

    RunRecord run;
    run.detection = &detection;
    run.states.resize(detection.candidates.size());

    if (detection.candidates.empty()) {
        run.outcome = "no_candidates";
        run.exit_code = kExitNoCandidates;
        console.out << "no candidates\n";
        write_report(config, units, run, console);
        return kExitNoCandidates;
    }

    std::vector<OffloadCandidate> searched;
    for (const auto& c : detection.candidates) {
        auto& st = run.states[c.index];
        const auto* rec = db.find(c.record_id);
        if (c.binding.status == BindStatus::Incompatible) {
            st.excluded = "incompatible interface";
            continue;
        }
        if (c.binding.status == BindStatus::ConfirmationRequired) {
            ConfirmationRecord conf{c.index, c.record_id, proposed_change(units, *rec, c), c.binding.notes, false};
            conf.approved = confirm_interface_change(conf.proposed_change, conf.notes, config.mode, console);
            run.confirmations.push_back(conf);
            if (!conf.approved) {
                st.excluded = "interface change declined";
                run.notes.push_back("candidate " + std::to_string(c.index) + " (" + c.record_id +
                                    ") declined; kept on CPU");
                continue;
            }
        }
        try {
            (void)render_snippet(*rec, c.binding, c.args, c.ret_target);
        } catch (const UnboundPlaceholder& e) {
            st.excluded = std::string("cannot render replacement: ") + e.what();
            continue;
        }
        st.searched_as = searched.size();
        run.searched_to_detected.push_back(c.index);
        searched.push_back(c);
        searched.back().index = *st.searched_as;
    }

    const auto n = searched.size();
    std::vector<std::string> filenames;
    for (const auto& u : units) filenames.push_back(u.path.filename().string());

    Validator validator = Validator::match_baseline();
    const auto measure_pattern = [&](const OffloadPattern& p, const BackendProfile& profile,
                                     const std::vector<std::string>& flags) {
        MeasurementResult r;
        r.pattern = p.str();
        fs::path dir;
        try {
            dir = write_variant(config.out_dir, p, units, searched, db);
        } catch (const std::exception& e) {
            r.status = MeasureStatus::CompileError;
            r.log = std::string("variant generation failed: ") + e.what() + "\n";
            return r;
        }
        MeasureRequest req{dir, filenames, flags, p.str(), config.repetitions};
        return p.none() ? measure_baseline(req, profile, validator, exec) : measure(req, profile, validator, exec);
    };

    console.out << "measuring baseline (" << n << " candidate" << (n == 1 ? "" : "s") << ")\n";
    run.baseline = measure_pattern(OffloadPattern(n), base_profile->second, {});
    if (!run.baseline->ok()) {
        run.outcome = "baseline_failed";
        run.exit_code = kExitBaselineFailed;
        console.err << "error: baseline " << to_string(run.baseline->status) << "\n" << run.baseline->log;
        write_report(config, units, run, console);
        return kExitBaselineFailed;
    }

    const auto measure_fn = [&](const OffloadPattern& p) {
        std::vector<const PatternRecord*> records;
        for (const auto i : p.on_indices()) records.push_back(db.find(searched[i].record_id));
        const auto& profile_name = records.front()->replacement.backend_profile;
        for (const auto* r : records)
            if (r->replacement.backend_profile != profile_name)
                run.notes.push_back("pattern " + p.str() + " mixes backend profiles; using '" + profile_name + "'");
        const auto prof = profiles.find(profile_name);
        if (prof == profiles.end()) {
            MeasurementResult r;
            r.pattern = p.str();
            r.status = MeasureStatus::CompileError;
            r.log = "unknown backend profile '" + profile_name + "'\n";
            return r;
        }
        console.out << "measuring " << p.str() << "\n";
        auto r = measure_pattern(p, prof->second, link_flags_for(records));
        if (!r.ok()) console.out << "  " << to_string(r.status) << "\n";
        return r;
    };

    run.search = search(searched, *run.baseline, measure_fn);
    if (run.search->combination_extrapolated)
        run.notes.push_back("more than two winners combined; combination rule extrapolated");
    for (const auto d : run.search->dropped_from_combination)
        run.notes.push_back("winner " + std::to_string(d) + " dropped from combination (conflicting edit)");
    if (run.search->selected.none()) run.notes.push_back("baseline selected");

    run.outcome = "ok";
    run.exit_code = kExitOk;
    write_report(config, units, run, console);

    const auto& s = *run.search;
    console.out << "selected\t" << (n == 0 ? std::string("baseline") : s.selected.str()) << "\n";
    for (const auto i : s.selected.on_indices())
        console.out << "offloaded\t" << location(units, searched[i]) << "\t" << searched[i].record_id << "\n";
    std::ostringstream speed;
    speed << std::fixed << std::setprecision(2) << s.speedup;
    console.out << "speedup vs. all-CPU\t" << speed.str() << "x\n";
    return kExitOk;
}

}  // namespace blockoff
