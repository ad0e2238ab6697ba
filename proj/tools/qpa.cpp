// Command-line front end: check, run, batch, compile-dfa, matrix, zoo.
//
// Exit codes: 0 success / accepted, 1 rejected, 2 violations / inconclusive,
// 3 unreadable input, structure errors, bad arguments.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qpa/qpa.hpp"

using namespace qpa;
using io::Json;

namespace {

enum class Output { human, json, csv };

struct CliConfig {
    double tolerance = 1e-9;
    std::string max_steps = "auto";
    std::optional<double> threshold;
    Output output = Output::human;
};

/// Raised for argument values CLI11 cannot validate on its own.
struct UsageError : Error {
    using Error::Error;
};

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;
constexpr int kExitViolations = 2;
constexpr int kExitError = 3;

std::optional<Output> parse_output(std::string_view s) {
    if (s == "human") {
        return Output::human;
    }
    if (s == "json") {
        return Output::json;
    }
    if (s == "csv") {
        return Output::csv;
    }
    return std::nullopt;
}

/// Shortest round-tripping decimal, so json/csv reruns are bit-identical.
std::string num(double v) {
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

void emit_json(const Json &j) { std::cout << j.dump(2) << "\n"; }

void write_text(const std::string &path, const std::string &text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) {
        throw ParseError("cannot write '" + path + "'");
    }
}

std::optional<size_t> resolve_max_steps(const std::string &s) {
    if (s == "auto") {
        return std::nullopt;
    }
    try {
        size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used == s.size() && v > 0) {
            return static_cast<size_t>(v);
        }
    } catch (const std::exception &) {
    }
    throw UsageError("--max-steps must be a positive integer or \"auto\", got '" + s + "'");
}

std::optional<double> env_double(const char *name) {
    const char *v = std::getenv(name);
    if (!v || !*v) {
        return std::nullopt;
    }
    char *end = nullptr;
    double d = std::strtod(v, &end);
    if (*end != '\0') {
        throw UsageError(std::string(name) + " is not a number: '" + v + "'");
    }
    return d;
}

// ---- check -----------------------------------------------------------------

struct CheckArgs {
    std::string file;
    bool simplified = false;
    size_t witnesses = 3;
};

int cmd_check(const CheckArgs &a, const CliConfig &cfg) {
    auto spec = io::load_spec(a.file);
    require_valid_structure(spec);
    wellformed::CheckOptions opt{cfg.tolerance, 100};
    auto summary = a.simplified ? wellformed::check_simplified_summary(spec, opt) : wellformed::check_all(spec, opt);
    if (cfg.output == Output::json) {
        Json j = io::to_json(summary, cfg.tolerance);
        j["file"] = a.file;
        emit_json(j);
    } else {
        std::cout << a.file << ": " << (summary.suite == wellformed::Suite::general ? "general" : "simplified")
                  << " conditions, tolerance " << num(cfg.tolerance) << "\n";
        for (const auto &o : summary.outcomes) {
            std::cout << "  " << (o.passed() ? "PASS" : "FAIL") << " " << wellformed::to_string(o.condition)
                      << "  violations " << o.violations << "  worst residual " << num(o.worst_residual) << "\n";
            for (size_t i = 0; i < std::min(a.witnesses, o.reports.size()); ++i) {
                const auto &r = o.reports[i];
                std::cout << "       witness (";
                for (size_t k = 0; k < r.witness.size(); ++k) {
                    std::cout << (k ? ", " : "") << r.witness[k];
                }
                std::cout << ")  residual " << num(r.residual) << "\n";
            }
        }
        std::cout << (summary.passed() ? "well-formed" : "NOT well-formed") << "\n";
    }
    return summary.passed() ? kExitOk : kExitViolations;
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
    std::string file;
    std::string word;
    bool trace = false;
    bool force = false;
};

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::accepted:
            return kExitOk;
        case Verdict::rejected:
            return kExitRejected;
        case Verdict::inconclusive:
            break;
    }
    return kExitViolations;
}

int cmd_run(const RunArgs &a, const CliConfig &cfg) {
    Recognizer r(io::load_spec(a.file), a.force, {cfg.tolerance, 100});
    RunOptions opt;
    opt.max_steps = resolve_max_steps(cfg.max_steps);
    RecognitionResult res;
    std::vector<StepSnapshot> trace;
    if (a.trace) {
        trace = r.trace(a.word, opt);
    }
    res = r.run(a.word, opt);
    auto verdict = decide(res, cfg.threshold);
    if (cfg.output == Output::json) {
        Json j = io::to_json(res);
        j["word"] = a.word;
        j["decision"] = to_string(verdict);
        j["threshold"] = cfg.threshold.value_or(0.5);
        if (a.trace) {
            j["trace"] = io::to_json(r.spec(), trace);
        }
        emit_json(j);
    } else {
        if (a.trace) {
            for (const auto &s : trace) {
                std::cout << "step " << s.step << ":";
                for (const auto &[c, amp] : s.state) {
                    std::cout << "  " << format_configuration(r.spec(), c) << " " << num(amp.real())
                              << (amp.imag() < 0 ? "" : "+") << num(amp.imag()) << "i";
                }
                std::cout << "\n        p_accept " << num(s.p_accept_total) << "  p_reject " << num(s.p_reject_total)
                          << "  residual " << num(s.residual_norm) << "\n";
            }
        }
        std::cout << "p_accept  " << num(res.p_accept) << "\n"
                  << "p_reject  " << num(res.p_reject) << "\n"
                  << "p_nonhalt " << num(res.p_nonhalt) << "\n"
                  << "steps     " << res.steps << (res.halted ? "" : " (step limit reached)") << "\n"
                  << "decision  " << to_string(verdict) << "\n";
    }
    return verdict_exit(verdict);
}

// ---- batch -----------------------------------------------------------------

struct BatchArgs {
    std::string file;
    std::string words_file;
    std::string out = "-";
    bool force = false;
    unsigned threads = 0;
};

std::vector<std::string> read_lines(const std::string &path) {
    std::istringstream in(io::read_file(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

int cmd_batch(const BatchArgs &a, const CliConfig &cfg) {
    Recognizer r(io::load_spec(a.file), a.force, {cfg.tolerance, 100});
    auto words = read_lines(a.words_file);
    RunOptions opt;
    opt.max_steps = resolve_max_steps(cfg.max_steps);

    // Each word is validated up front so a bad line fails the whole batch.
    for (size_t i = 0; i < words.size(); ++i) {
        try {
            r.spec().alphabets().parse_word(words[i]);
        } catch (const Error &e) {
            throw ParseError(a.words_file + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }

    std::vector<RecognitionResult> results(words.size());
    std::vector<std::string> errors(words.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < words.size(); i = next++) {
            try {
                results[i] = r.run(words[i], opt);
            } catch (const std::exception &e) {
                errors[i] = e.what();
            }
        }
    };
    unsigned n = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<size_t>(n, std::max<size_t>(words.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    for (size_t i = 0; i < words.size(); ++i) {
        if (!errors[i].empty()) {
            throw TapeOverrun(a.words_file + ":" + std::to_string(i + 1) + ": " + errors[i]);
        }
    }

    std::string text;
    if (cfg.output == Output::json) {
        Json rows = Json::array();
        for (size_t i = 0; i < words.size(); ++i) {
            Json j = io::to_json(results[i]);
            j["word"] = words[i];
            j["decision"] = to_string(decide(results[i], cfg.threshold));
            rows.push_back(std::move(j));
        }
        text = io::dump(Json{{"file", a.file}, {"rows", rows}});
    } else {
        text = "word,p_accept,p_reject,p_nonhalt,steps,halted,decision\n";
        for (size_t i = 0; i < words.size(); ++i) {
            const auto &res = results[i];
            text += words[i] + "," + num(res.p_accept) + "," + num(res.p_reject) + "," + num(res.p_nonhalt) + "," +
                    std::to_string(res.steps) + "," + (res.halted ? "true" : "false") + "," +
                    std::string(to_string(decide(res, cfg.threshold))) + "\n";
        }
    }
    write_text(a.out, text);
    return kExitOk;
}

// ---- compile-dfa -----------------------------------------------------------

struct CompileArgs {
    std::string in;
    std::string out = "-";
};

int cmd_compile_dfa(const CompileArgs &a, const CliConfig &cfg) {
    auto d = io::load_dfa(a.in);
    auto spec = dfa::compile(d);
    auto summary = wellformed::check_simplified_summary(spec, {cfg.tolerance, 100});
    // In JSON mode a stdout target is embedded so stdout stays one document.
    bool embed = cfg.output == Output::json && a.out == "-";
    if (summary.passed() && !embed) {
        write_text(a.out, io::dump_spec(spec));
    }
    if (cfg.output == Output::json) {
        Json j{{"input", a.in},
               {"output", a.out},
               {"states", spec.num_states()},
               {"transitions", spec.transitions().size()},
               {"written", summary.passed()},
               {"check", io::to_json(summary, cfg.tolerance)}};
        if (embed && summary.passed()) {
            j["automaton"] = io::to_json(spec);
        }
        emit_json(j);
    } else if (a.out != "-") {
        std::cout << a.in << " -> " << a.out << ": " << spec.num_states() << " states, "
                  << spec.transitions().size() << " transitions, "
                  << (summary.passed() ? "well-formed" : "NOT well-formed, nothing written") << "\n";
    }
    return summary.passed() ? kExitOk : kExitViolations;
}

// ---- matrix ----------------------------------------------------------------

struct MatrixArgs {
    std::string file;
    std::string word;
    size_t radius = 3;
    bool verify = false;
    bool dump = false;
    std::string dump_out = "-";
    size_t cap = matrixlab::kDefaultWindowCap;
};

int cmd_matrix(const MatrixArgs &a, const CliConfig &cfg) {
    auto spec = io::load_spec(a.file);
    require_valid_structure(spec);
    auto window = matrixlab::enumerate_window(spec, a.word, a.radius, a.cap);
    auto m = matrixlab::build_matrix(spec, window);
    std::optional<matrixlab::UnitarityReport> rep;
    if (a.verify) {
        rep = matrixlab::check_truncated_unitarity(m, window, cfg.tolerance);
    }
    if (a.dump && !(cfg.output == Output::json && a.dump_out == "-")) {
        write_text(a.dump_out, io::dump(io::to_json(spec, window, m)));
    }
    if (cfg.output == Output::json) {
        Json j{{"file", a.file},
               {"word", a.word},
               {"radius", a.radius},
               {"dim", m.dim()},
               {"nonzeros", m.nonzeros()},
               {"interior_cols", window.interior.count_cols()},
               {"interior_rows", window.interior.count_rows()}};
        if (rep) {
            j["verify"] = io::to_json(*rep, cfg.tolerance);
        }
        if (a.dump && a.dump_out == "-") {
            j["matrix"] = io::to_json(spec, window, m);
        }
        emit_json(j);
    } else if (!(a.dump && a.dump_out == "-")) {
        std::cout << "window: " << m.dim() << " configurations, " << m.nonzeros() << " nonzeros, "
                  << window.interior.count_cols() << " interior columns, " << window.interior.count_rows()
                  << " interior rows\n";
        if (rep) {
            std::cout << "column deviation " << num(rep->column_deviation) << "\n"
                      << "row deviation    " << num(rep->row_deviation) << "\n";
            if (rep->worst_row && rep->row_deviation > cfg.tolerance) {
                std::cout << "worst row        " << format_configuration(spec, window.configs[*rep->worst_row])
                          << "\n";
            }
            std::cout << (rep->passed ? "unitary on interior" : "NOT unitary on interior") << "\n";
        }
    }
    return !rep || rep->passed ? kExitOk : kExitViolations;
}

// ---- zoo -------------------------------------------------------------------

QpaSpec library_spec(const std::string &name) {
    for (const auto &f : zoo::fixtures()) {
        if (f.name == name) {
            return f.make();
        }
    }
    return zoo::get(name).spec;
}

int cmd_zoo_list(const CliConfig &cfg) {
    if (cfg.output == Output::json) {
        Json entries = Json::array();
        for (const auto &n : zoo::names()) {
            const auto &e = zoo::get(n);
            entries.push_back(Json{{"name", n},
                                   {"language", e.language},
                                   {"kind", to_string(e.spec.kind())},
                                   {"states", e.spec.num_states()},
                                   {"probability", e.claimed_probability},
                                   {"fixture", false}});
        }
        for (const auto &f : zoo::fixtures()) {
            auto spec = f.make();
            entries.push_back(Json{{"name", f.name},
                                   {"language", f.description},
                                   {"kind", to_string(spec.kind())},
                                   {"states", spec.num_states()},
                                   {"probability", nullptr},
                                   {"fixture", true}});
        }
        emit_json(Json{{"entries", entries}});
        return kExitOk;
    }
    for (const auto &n : zoo::names()) {
        const auto &e = zoo::get(n);
        std::cout << n << "  " << e.language << "  (" << to_string(e.spec.kind()) << ", " << e.spec.num_states()
                  << " states, probability " << num(e.claimed_probability) << ")\n";
    }
    for (const auto &f : zoo::fixtures()) {
        std::cout << f.name << "  [fixture] " << f.description << "\n";
    }
    return kExitOk;
}

int cmd_zoo_export(const std::string &name, const std::string &out) {
    write_text(out, io::dump_spec(library_spec(name)));
    return kExitOk;
}

int report_error(const CliConfig &cfg, std::string_view kind, const std::string &message) {
    if (cfg.output == Output::json) {
        emit_json(Json{{"error", {{"kind", kind}, {"message", message}}}});
    }
    std::cerr << "qpa: " << message << "\n";
    return kExitError;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum pushdown automata toolkit"};
    app.require_subcommand(1);

    CliConfig cfg;
    std::optional<double> tolerance, threshold;
    std::optional<std::string> max_steps;
    bool json = false, csv = false;
    app.add_option("--tolerance", tolerance, "Numerical tolerance (env QPA_TOLERANCE, default 1e-9)");
    app.add_flag("--json", json, "Machine-readable JSON output");
    app.add_flag("--csv", csv, "CSV output (batch)");

    auto add_run_options = [&](CLI::App *sub) {
        sub->add_option("--max-steps", max_steps, "Step limit or \"auto\" (20 (|w| + 2))");
        sub->add_option("--threshold", threshold, "Decision threshold in (0.5, 1]");
        sub->add_option("--tolerance", tolerance, "Numerical tolerance");
        sub->add_flag("--json", json, "JSON output");
    };

    CheckArgs check;
    auto *c_check = app.add_subcommand("check", "Evaluate the well-formedness conditions");
    c_check->add_option("file", check.file, "Automaton JSON")->required();
    c_check->add_flag("--simplified", check.simplified, "Force the simplified conditions");
    c_check->add_option("--witnesses", check.witnesses, "Witnesses printed per condition");
    c_check->add_option("--tolerance", tolerance, "Numerical tolerance");
    c_check->add_flag("--json", json, "JSON output");

    RunArgs run;
    auto *c_run = app.add_subcommand("run", "Recognize one word");
    c_run->add_option("file", run.file, "Automaton JSON")->required();
    c_run->add_option("word", run.word, "Input word (space-separate multi-character symbols)");
    c_run->add_flag("--trace", run.trace, "Print every step");
    c_run->add_flag("--force", run.force, "Run even if the automaton is not well-formed");
    add_run_options(c_run);

    BatchArgs batch;
    auto *c_batch = app.add_subcommand("batch", "Recognize every line of a words file");
    c_batch->add_option("file", batch.file, "Automaton JSON")->required();
    c_batch->add_option("words", batch.words_file, "Words file, one word per line")->required();
    c_batch->add_option("-o,--out", batch.out, "CSV output path (default stdout)");
    c_batch->add_option("--threads", batch.threads, "Worker threads (default: hardware)");
    c_batch->add_flag("--force", batch.force, "Run even if the automaton is not well-formed");
    c_batch->add_flag("--csv", csv, "CSV output (default)");
    add_run_options(c_batch);

    CompileArgs compile;
    auto *c_compile = app.add_subcommand("compile-dfa", "Compile a DFA to a reversible pushdown automaton");
    c_compile->add_option("in", compile.in, "DFA JSON")->required();
    c_compile->add_option("out", compile.out, "Output path (default stdout)");
    c_compile->add_option("--tolerance", tolerance, "Numerical tolerance");
    c_compile->add_flag("--json", json, "JSON output");

    MatrixArgs matrix;
    auto *c_matrix = app.add_subcommand("matrix", "Build and inspect a truncated evolution matrix");
    c_matrix->add_option("file", matrix.file, "Automaton JSON")->required();
    c_matrix->add_option("--word", matrix.word, "Input word");
    c_matrix->add_option("--radius", matrix.radius, "Steps explored from the initial configuration");
    c_matrix->add_flag("--verify", matrix.verify, "Check interior unitarity");
    auto *dump_opt = c_matrix->add_option("--dump", matrix.dump_out, "Write the matrix as JSON (default stdout)")
                         ->expected(0, 1)
                         ->default_str("-");
    c_matrix->add_option("--cap", matrix.cap, "Maximum window size");
    c_matrix->add_option("--tolerance", tolerance, "Numerical tolerance");
    c_matrix->add_flag("--json", json, "JSON output");

    auto *c_zoo = app.add_subcommand("zoo", "Built-in automata");
    c_zoo->require_subcommand(1);
    auto *c_zoo_list = c_zoo->add_subcommand("list", "List the built-in automata");
    c_zoo_list->add_flag("--json", json, "JSON output");
    std::string export_name, export_out = "-";
    auto *c_zoo_export = c_zoo->add_subcommand("export", "Write a built-in automaton as JSON");
    c_zoo_export->add_option("name", export_name, "Entry name")->required();
    c_zoo_export->add_option("-o,--out", export_out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (const char *env = std::getenv("QPA_OUTPUT"); env && *env) {
            auto o = parse_output(env);
            if (!o) {
                throw UsageError(std::string("QPA_OUTPUT must be human, json or csv, got '") + env + "'");
            }
            cfg.output = *o;
        }
        if (json && csv) {
            throw UsageError("--json and --csv are mutually exclusive");
        }
        if (json) {
            cfg.output = Output::json;
        } else if (csv) {
            cfg.output = Output::csv;
        }
        if (auto env = env_double("QPA_TOLERANCE")) {
            cfg.tolerance = *env;
        }
        if (tolerance) {
            cfg.tolerance = *tolerance;
        }
        if (!(cfg.tolerance > 0)) {
            throw UsageError("tolerance must be positive");
        }
        if (threshold && !(*threshold > 0.5 && *threshold <= 1.0)) {
            throw UsageError("threshold must lie in (0.5, 1]");
        }
        cfg.threshold = threshold;
        if (max_steps) {
            cfg.max_steps = *max_steps;
        }
        matrix.dump = dump_opt->count() > 0;

        if (*c_check) {
            return cmd_check(check, cfg);
        }
        if (*c_run) {
            return cmd_run(run, cfg);
        }
        if (*c_batch) {
            return cmd_batch(batch, cfg);
        }
        if (*c_compile) {
            return cmd_compile_dfa(compile, cfg);
        }
        if (*c_matrix) {
            return cmd_matrix(matrix, cfg);
        }
        if (*c_zoo_list) {
            return cmd_zoo_list(cfg);
        }
        if (*c_zoo_export) {
            return cmd_zoo_export(export_name, export_out);
        }
    } catch (const UsageError &e) {
        return report_error(cfg, "usage", e.what());
    } catch (const ParseError &e) {
        return report_error(cfg, "parse", e.what());
    } catch (const UnknownSymbol &e) {
        return report_error(cfg, "unknown_symbol", e.what());
    } catch (const StructureError &e) {
        return report_error(cfg, "structure", e.what());
    } catch (const NotWellFormed &e) {
        return report_error(cfg, "not_well_formed", e.what());
    } catch (const TapeOverrun &e) {
        return report_error(cfg, "tape_overrun", e.what());
    } catch (const WindowTooLarge &e) {
        return report_error(cfg, "window_too_large", e.what());
    } catch (const DfaError &e) {
        return report_error(cfg, "dfa", e.what());
    } catch (const std::exception &e) {
        return report_error(cfg, "internal", e.what());
    }
    return kExitError;
}
