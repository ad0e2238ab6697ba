#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include "qpa/dfa2rpa.hpp"
#include "qpa/evolve.hpp"
#include "qpa/matrixlab.hpp"
#include "qpa/wellformed.hpp"

namespace qpa::io {

using Json = nlohmann::ordered_json;

namespace detail {

inline void require_fields(const Json &j, std::string_view what, std::initializer_list<std::string_view> required,
                           std::initializer_list<std::string_view> optional = {}) {
    if (!j.is_object()) {
        throw ParseError(std::string(what) + " must be a JSON object");
    }
    std::set<std::string_view> known(required);
    known.insert(optional.begin(), optional.end());
    for (const auto &[k, v] : j.items()) {
        if (!known.count(k)) {
            throw ParseError("unknown field '" + k + "' in " + std::string(what));
        }
    }
    for (auto k : required) {
        if (!j.contains(std::string(k))) {
            throw ParseError("missing field '" + std::string(k) + "' in " + std::string(what));
        }
    }
}

inline std::string get_string(const Json &j, std::string_view key, std::string_view what) {
    const auto &v = j.at(std::string(key));
    if (!v.is_string()) {
        throw ParseError("field '" + std::string(key) + "' of " + std::string(what) + " must be a string");
    }
    return v.get<std::string>();
}

inline std::vector<std::string> get_strings(const Json &j, std::string_view key, std::string_view what) {
    const auto &v = j.at(std::string(key));
    if (!v.is_array()) {
        throw ParseError("field '" + std::string(key) + "' of " + std::string(what) + " must be an array");
    }
    std::vector<std::string> out;
    for (const auto &e : v) {
        if (!e.is_string()) {
            throw ParseError("field '" + std::string(key) + "' of " + std::string(what) + " must hold strings");
        }
        out.push_back(e.get<std::string>());
    }
    return out;
}

inline Json complex_pair(Complex z) { return Json::array({z.real(), z.imag()}); }

}  // namespace detail

// ---- automaton documents ---------------------------------------------------

inline Json to_json(const QpaSpec &spec) {
    const auto &alpha = spec.alphabets();
    Json j;
    j["kind"] = to_string(spec.kind());
    j["states"] = spec.state_names();
    j["input_alphabet"] = alpha.input_names();
    j["stack_alphabet"] = alpha.stack_symbol_names();
    j["initial"] = spec.state_name(spec.initial());
    Json acc = Json::array(), rej = Json::array();
    for (auto q : spec.accepting()) {
        acc.push_back(spec.state_name(q));
    }
    for (auto q : spec.rejecting()) {
        rej.push_back(spec.state_name(q));
    }
    j["accepting"] = acc;
    j["rejecting"] = rej;
    Json dir = Json::object();
    for (StateId q = 0; q < spec.num_states(); ++q) {
        if (auto d = spec.direction(q)) {
            dir[spec.state_name(q)] = to_string(*d);
        }
    }
    if (spec.kind() != Kind::general || !dir.empty()) {
        j["direction"] = dir;
    }
    Json ts = Json::array();
    for (const auto &t : spec.transitions()) {
        ts.push_back(Json{{"from", spec.state_name(t.from)},
                          {"input", alpha.tape_name(t.input)},
                          {"stack_top", alpha.stack_name(t.stack_top)},
                          {"to", spec.state_name(t.to)},
                          {"dir", to_string(t.dir)},
                          {"push", alpha.format_stack_word(t.push)},
                          {"amp", t.amp.literal()}});
    }
    j["transitions"] = ts;
    return j;
}

inline std::string dump(const Json &j) { return j.dump(2) + "\n"; }

inline std::string dump_spec(const QpaSpec &spec) { return dump(to_json(spec)); }

inline QpaSpec spec_from_json(const Json &j) {
    const char *what = "automaton document";
    detail::require_fields(j, what,
                           {"kind", "states", "input_alphabet", "stack_alphabet", "initial", "accepting", "rejecting",
                            "transitions"},
                           {"direction"});
    auto kind = parse_kind(detail::get_string(j, "kind", what));
    if (!kind) {
        throw ParseError("kind must be one of general, simplified, reversible");
    }
    SpecBuilder b(*kind);
    auto input = detail::get_strings(j, "input_alphabet", what);
    auto stack = detail::get_strings(j, "stack_alphabet", what);
    b.input_alphabet(input).stack_alphabet(stack);
    b.states(detail::get_strings(j, "states", what)).initial(detail::get_string(j, "initial", what));
    b.accepting(detail::get_strings(j, "accepting", what)).rejecting(detail::get_strings(j, "rejecting", what));
    if (j.contains("direction")) {
        const auto &dir = j.at("direction");
        if (!dir.is_object()) {
            throw ParseError("direction must map state names to \"stay\" or \"advance\"");
        }
        for (const auto &[q, d] : dir.items()) {
            auto parsed = d.is_string() ? parse_direction(d.get<std::string>()) : std::nullopt;
            if (!parsed) {
                throw ParseError("direction of '" + q + "' must be \"stay\" or \"advance\"");
            }
            b.direction(q, *parsed);
        }
    } else if (*kind != Kind::general) {
        throw ParseError("a " + std::string(to_string(*kind)) + " automaton needs a direction map");
    }

    // Push words are tokenized against the working stack alphabet.
    Alphabets alpha(input, stack);
    const auto &ts = j.at("transitions");
    if (!ts.is_array()) {
        throw ParseError("transitions must be an array");
    }
    for (const auto &t : ts) {
        const char *tw = "transition";
        detail::require_fields(t, tw, {"from", "input", "stack_top", "to", "dir", "push", "amp"});
        auto d = parse_direction(detail::get_string(t, "dir", tw));
        if (!d) {
            throw ParseError("transition dir must be \"stay\" or \"advance\"");
        }
        std::vector<std::string> push;
        for (auto id : alpha.parse_stack_word(detail::get_string(t, "push", tw))) {
            push.push_back(alpha.stack_name(id));
        }
        const auto &amp = t.at("amp");
        Amplitude a = amp.is_string()   ? Amplitude::parse(amp.get<std::string>())
                      : amp.is_number() ? Amplitude::parse(amp.dump())
                                        : throw ParseError("transition amp must be a literal string or a number");
        b.transition(detail::get_string(t, "from", tw), detail::get_string(t, "input", tw),
                     detail::get_string(t, "stack_top", tw), detail::get_string(t, "to", tw), *d, std::move(push),
                     std::move(a));
    }
    return b.build();
}

inline Json parse_text(const std::string &text, std::string_view origin) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(std::string(origin) + ": " + e.what());
    }
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline QpaSpec parse_spec(const std::string &text, std::string_view origin = "automaton document") {
    return spec_from_json(parse_text(text, origin));
}

inline QpaSpec load_spec(const std::string &path) { return parse_spec(read_file(path), path); }

// ---- DFA documents ---------------------------------------------------------

inline dfa::Dfa dfa_from_json(const Json &j) {
    const char *what = "DFA document";
    dfa::Dfa d;
    try {
        detail::require_fields(j, what, {"states", "alphabet", "initial", "finals", "transitions"});
        d.states = detail::get_strings(j, "states", what);
        d.alphabet = detail::get_strings(j, "alphabet", what);
        d.initial = detail::get_string(j, "initial", what);
        d.finals = detail::get_strings(j, "finals", what);
        const auto &ts = j.at("transitions");
        if (!ts.is_array()) {
            throw ParseError("DFA transitions must be an array");
        }
        for (const auto &t : ts) {
            detail::require_fields(t, "DFA transition", {"from", "input", "to"});
            d.transition(detail::get_string(t, "from", "DFA transition"), detail::get_string(t, "input", "DFA transition"),
                         detail::get_string(t, "to", "DFA transition"));
        }
    } catch (const ParseError &e) {
        throw DfaError(e.what());
    }
    dfa::validate(d);
    return d;
}

inline Json to_json(const dfa::Dfa &d) {
    Json ts = Json::array();
    for (const auto &q : d.states) {
        for (const auto &s : d.alphabet) {
            ts.push_back(Json{{"from", q}, {"input", s}, {"to", d.next(q, s)}});
        }
    }
    return Json{{"states", d.states},
                {"alphabet", d.alphabet},
                {"initial", d.initial},
                {"finals", d.finals},
                {"transitions", ts}};
}

inline dfa::Dfa load_dfa(const std::string &path) {
    std::string text;
    try {
        text = read_file(path);
        return dfa_from_json(parse_text(text, path));
    } catch (const ParseError &e) {
        throw DfaError(e.what());
    }
}

// ---- results ---------------------------------------------------------------

inline Json to_json(const wellformed::ConditionSummary &s, double tolerance) {
    Json conds = Json::array();
    for (const auto &o : s.outcomes) {
        Json ws = Json::array();
        for (const auto &r : o.reports) {
            ws.push_back(Json{{"witness", r.witness}, {"residual", r.residual}});
        }
        conds.push_back(Json{{"condition", wellformed::to_string(o.condition)},
                             {"passed", o.passed()},
                             {"violations", o.violations},
                             {"worst_residual", o.worst_residual},
                             {"witnesses", ws}});
    }
    return Json{{"suite", s.suite == wellformed::Suite::general ? "general" : "simplified"},
                {"passed", s.passed()},
                {"tolerance", tolerance},
                {"worst_residual", s.worst_residual()},
                {"conditions", conds}};
}

inline Json to_json(const RecognitionResult &r) {
    return Json{{"p_accept", r.p_accept},
                {"p_reject", r.p_reject},
                {"p_nonhalt", r.p_nonhalt},
                {"steps", r.steps},
                {"halted", r.halted}};
}

inline Json to_json(const QpaSpec &spec, const Configuration &c) {
    return Json{{"state", spec.state_name(c.state)},
                {"head", c.head},
                {"stack", spec.alphabets().format_stack_word(c.stack)}};
}

inline Json to_json(const QpaSpec &spec, const Superposition &psi) {
    Json out = Json::array();
    for (const auto &[c, a] : psi) {
        Json e = to_json(spec, c);
        e["amplitude"] = detail::complex_pair(a);
        out.push_back(std::move(e));
    }
    return out;
}

inline Json to_json(const QpaSpec &spec, const std::vector<StepSnapshot> &trace) {
    Json out = Json::array();
    for (const auto &s : trace) {
        out.push_back(Json{{"step", s.step},
                           {"superposition", to_json(spec, s.state)},
                           {"p_accept_inc", s.p_accept_inc},
                           {"p_reject_inc", s.p_reject_inc},
                           {"p_accept_total", s.p_accept_total},
                           {"p_reject_total", s.p_reject_total},
                           {"residual_norm", s.residual_norm}});
    }
    return out;
}

inline Json to_json(const matrixlab::UnitarityReport &r, double tolerance) {
    return Json{{"passed", r.passed},
                {"tolerance", tolerance},
                {"column_deviation", r.column_deviation},
                {"row_deviation", r.row_deviation},
                {"interior_cols", r.interior_cols},
                {"interior_rows", r.interior_rows}};
}

inline Json to_json(const QpaSpec &spec, const matrixlab::ConfigWindow &w, const matrixlab::TruncatedMatrix &m) {
    Json configs = Json::array(), icols = Json::array(), irows = Json::array(), trip = Json::array();
    for (size_t i = 0; i < w.size(); ++i) {
        configs.push_back(to_json(spec, w.configs[i]));
        if (w.interior.cols[i]) {
            icols.push_back(i);
        }
        if (w.interior.rows[i]) {
            irows.push_back(i);
        }
    }
    for (const auto &t : m.triplets()) {
        trip.push_back(Json::array({t.row, t.col, t.value.real(), t.value.imag()}));
    }
    return Json{{"dim", m.dim()},
                {"configurations", configs},
                {"interior_cols", icols},
                {"interior_rows", irows},
                {"triplets", trip}};
}

}  // namespace qpa::io
