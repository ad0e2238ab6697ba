#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "qpa/amplitude.hpp"
#include "qpa/error.hpp"

namespace qpa {

using StateId = std::uint32_t;
using SymbolId = std::uint32_t;

/// A word over the working stack alphabet, bottom first.
using StackWord = std::vector<SymbolId>;

inline constexpr std::string_view kLeftMarker = "#";
inline constexpr std::string_view kRightMarker = "$";
inline constexpr std::string_view kStackBase = "Z0";

/// Input head movement; `stay` keeps the head on the current cell.
enum class Direction : std::uint8_t { stay = 0, advance = 1 };
inline constexpr std::array<Direction, 2> kDirections{Direction::stay, Direction::advance};

inline std::string_view to_string(Direction d) { return d == Direction::stay ? "stay" : "advance"; }

inline std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "stay") {
        return Direction::stay;
    }
    if (s == "advance") {
        return Direction::advance;
    }
    return std::nullopt;
}

enum class Kind { general, simplified, reversible };

inline std::string_view to_string(Kind k) {
    switch (k) {
        case Kind::general:
            return "general";
        case Kind::simplified:
            return "simplified";
        case Kind::reversible:
            return "reversible";
    }
    return "general";
}

inline std::optional<Kind> parse_kind(std::string_view s) {
    if (s == "general") {
        return Kind::general;
    }
    if (s == "simplified") {
        return Kind::simplified;
    }
    if (s == "reversible") {
        return Kind::reversible;
    }
    return std::nullopt;
}

namespace detail {

inline bool has_space(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

/// Splits `text` into names drawn from `names`. Whitespace-separated text is
/// split on whitespace; otherwise the text must have exactly one segmentation.
inline std::vector<std::string> tokenize(std::string_view text, const std::vector<std::string> &names,
                                         std::string_view what) {
    std::vector<std::string> out;
    if (has_space(text)) {
        size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
                ++i;
            }
            size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) {
                ++j;
            }
            if (j > i) {
                std::string tok(text.substr(i, j - i));
                if (std::find(names.begin(), names.end(), tok) == names.end()) {
                    throw UnknownSymbol("unknown " + std::string(what) + " symbol '" + tok + "'");
                }
                out.push_back(std::move(tok));
            }
            i = j;
        }
        return out;
    }
    // ways[i] = number of segmentations of text[i..], saturated at 2.
    std::vector<int> ways(text.size() + 1, 0);
    std::vector<size_t> choice(text.size() + 1, 0);
    ways[text.size()] = 1;
    for (size_t i = text.size(); i-- > 0;) {
        for (size_t k = 0; k < names.size(); ++k) {
            const auto &n = names[k];
            if (!n.empty() && text.substr(i, n.size()) == n && ways[i + n.size()] > 0) {
                ways[i] = std::min(2, ways[i] + ways[i + n.size()]);
                choice[i] = k;
            }
        }
    }
    if (ways[0] == 0) {
        throw UnknownSymbol("'" + std::string(text) + "' is not a word over the " + std::string(what) +
                            " alphabet");
    }
    if (ways[0] > 1) {
        throw ParseError("'" + std::string(text) + "' splits into " + std::string(what) +
                         " symbols in more than one way; separate symbols with spaces");
    }
    for (size_t i = 0; i < text.size();) {
        out.push_back(names[choice[i]]);
        i += names[choice[i]].size();
    }
    return out;
}

inline void check_symbol_names(const std::vector<std::string> &names, std::string_view what) {
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i].empty() || has_space(names[i])) {
            throw ParseError(std::string(what) + " symbol names must be nonempty and contain no whitespace");
        }
        if (names[i] == kLeftMarker || names[i] == kRightMarker || names[i] == kStackBase) {
            throw ParseError("'" + names[i] + "' is reserved and cannot be declared in the " +
                             std::string(what) + " alphabet");
        }
        for (size_t j = 0; j < i; ++j) {
            if (names[i] == names[j]) {
                throw ParseError("duplicate " + std::string(what) + " symbol '" + names[i] + "'");
            }
        }
    }
}

}  // namespace detail

/// Input alphabet Σ, tape alphabet Γ = Σ ∪ {#, $}, stack alphabet T and
/// working stack alphabet Δ = T ∪ {Z0}. Symbol ids index the sorted name
/// lists of Γ and Δ respectively.
class Alphabets {
  public:
    Alphabets() : Alphabets({}, {}) {}

    Alphabets(std::vector<std::string> input, std::vector<std::string> stack) {
        detail::check_symbol_names(input, "input");
        detail::check_symbol_names(stack, "stack");
        std::sort(input.begin(), input.end());
        std::sort(stack.begin(), stack.end());
        input_ = input;
        stack_ = stack;
        tape_ = input;
        tape_.emplace_back(kLeftMarker);
        tape_.emplace_back(kRightMarker);
        std::sort(tape_.begin(), tape_.end());
        delta_ = stack;
        delta_.emplace_back(kStackBase);
        std::sort(delta_.begin(), delta_.end());
        for (const auto &s : input_) {
            input_ids_.push_back(tape_id(s));
        }
        for (const auto &s : stack_) {
            stack_ids_.push_back(stack_id(s));
        }
        left_ = tape_id(kLeftMarker);
        right_ = tape_id(kRightMarker);
        base_ = stack_id(kStackBase);
    }

    size_t tape_size() const { return tape_.size(); }
    size_t stack_size() const { return delta_.size(); }

    const std::string &tape_name(SymbolId id) const { return tape_.at(id); }
    const std::string &stack_name(SymbolId id) const { return delta_.at(id); }

    std::optional<SymbolId> find_tape(std::string_view name) const { return find(tape_, name); }
    std::optional<SymbolId> find_stack(std::string_view name) const { return find(delta_, name); }

    SymbolId tape_id(std::string_view name) const {
        auto id = find_tape(name);
        if (!id) {
            throw UnknownSymbol("unknown tape symbol '" + std::string(name) + "'");
        }
        return *id;
    }

    SymbolId stack_id(std::string_view name) const {
        auto id = find_stack(name);
        if (!id) {
            throw UnknownSymbol("unknown stack symbol '" + std::string(name) + "'");
        }
        return *id;
    }

    SymbolId left_marker() const { return left_; }
    SymbolId right_marker() const { return right_; }
    SymbolId base() const { return base_; }

    bool is_input(SymbolId tape_symbol) const { return tape_symbol != left_ && tape_symbol != right_; }

    /// Σ names (sorted) and their Γ ids.
    const std::vector<std::string> &input_names() const { return input_; }
    std::span<const SymbolId> input_ids() const { return input_ids_; }

    /// T names (sorted) and their Δ ids.
    const std::vector<std::string> &stack_symbol_names() const { return stack_; }
    std::span<const SymbolId> stack_symbol_ids() const { return stack_ids_; }

    const std::vector<std::string> &tape_names() const { return tape_; }
    const std::vector<std::string> &stack_names() const { return delta_; }

    /// Parses an input word (Σ symbols only) into Γ ids.
    std::vector<SymbolId> parse_word(std::string_view text) const {
        std::vector<SymbolId> out;
        for (const auto &tok : detail::tokenize(text, input_, "input")) {
            out.push_back(tape_id(tok));
        }
        return out;
    }

    StackWord parse_stack_word(std::string_view text) const {
        StackWord out;
        for (const auto &tok : detail::tokenize(text, delta_, "stack")) {
            out.push_back(stack_id(tok));
        }
        return out;
    }

    /// Canonical text for a stack word: symbols concatenated when that reads
    /// back unambiguously, space separated otherwise.
    std::string format_stack_word(const StackWord &w) const {
        std::vector<std::string> names;
        for (auto s : w) {
            names.push_back(stack_name(s));
        }
        return format_names(names, delta_);
    }

    std::string format_word(std::span<const SymbolId> w) const {
        std::vector<std::string> names;
        for (auto s : w) {
            names.push_back(tape_name(s));
        }
        return format_names(names, tape_);
    }

  private:
    static std::optional<SymbolId> find(const std::vector<std::string> &v, std::string_view name) {
        auto it = std::lower_bound(v.begin(), v.end(), name);
        if (it == v.end() || *it != name) {
            return std::nullopt;
        }
        return static_cast<SymbolId>(it - v.begin());
    }

    static std::string format_names(const std::vector<std::string> &names, const std::vector<std::string> &alphabet) {
        std::string joined;
        for (const auto &n : names) {
            joined += n;
        }
        try {
            if (detail::tokenize(joined, alphabet, "") == names) {
                return joined;
            }
        } catch (const Error &) {
        }
        std::string spaced;
        for (size_t i = 0; i < names.size(); ++i) {
            spaced += (i ? " " : "") + names[i];
        }
        return spaced;
    }

    std::vector<std::string> input_, stack_, tape_, delta_;
    std::vector<SymbolId> input_ids_, stack_ids_;
    SymbolId left_ = 0, right_ = 0, base_ = 0;
};

/// One stored value δ(from, input, stack_top, to, dir, push).
struct Transition {
    StateId from = 0;
    SymbolId input = 0;
    SymbolId stack_top = 0;
    StateId to = 0;
    Direction dir = Direction::stay;
    StackWord push;
    Amplitude amp;

    auto key() const { return std::tie(from, input, stack_top, to, dir, push); }
};

/// Nonzero entry of the column addressed by (q1, σ, τ).
struct ColumnEntry {
    StateId to = 0;
    Direction dir = Direction::stay;
    StackWord push;
    Complex amp;
};

class SpecBuilder;

/// An immutable quantum pushdown automaton.
///
/// States are kept in lexicographic order and StateId indexes that order, so
/// every iteration over ids is also deterministic by name.
class QpaSpec {
  public:
    Kind kind() const { return kind_; }
    const Alphabets &alphabets() const { return alphabets_; }

    size_t num_states() const { return states_.size(); }
    const std::vector<std::string> &state_names() const { return states_; }
    const std::string &state_name(StateId q) const { return states_.at(q); }

    std::optional<StateId> find_state(std::string_view name) const {
        auto it = std::lower_bound(states_.begin(), states_.end(), name);
        if (it == states_.end() || *it != name) {
            return std::nullopt;
        }
        return static_cast<StateId>(it - states_.begin());
    }

    StateId state_id(std::string_view name) const {
        auto id = find_state(name);
        if (!id) {
            throw UnknownSymbol("unknown state '" + std::string(name) + "'");
        }
        return *id;
    }

    StateId initial() const { return initial_; }
    bool is_accepting(StateId q) const { return accepting_.at(q); }
    bool is_rejecting(StateId q) const { return rejecting_.at(q); }
    bool is_halting(StateId q) const { return accepting_.at(q) || rejecting_.at(q); }

    std::vector<StateId> accepting() const { return members(accepting_); }
    std::vector<StateId> rejecting() const { return members(rejecting_); }

    /// D(q) for simplified and reversible specs.
    std::optional<Direction> direction(StateId q) const { return direction_.at(q); }

    bool has_total_direction() const {
        return std::all_of(direction_.begin(), direction_.end(), [](const auto &d) { return d.has_value(); });
    }

    /// All stored transitions, sorted by (from, input, stack_top, to, dir, push).
    std::span<const Transition> transitions() const { return transitions_; }

    size_t num_triples() const { return states_.size() * alphabets_.tape_size() * alphabets_.stack_size(); }

    size_t triple_index(StateId q, SymbolId sigma, SymbolId tau) const {
        return (static_cast<size_t>(q) * alphabets_.tape_size() + sigma) * alphabets_.stack_size() + tau;
    }

    std::tuple<StateId, SymbolId, SymbolId> triple_at(size_t index) const {
        size_t tau = index % alphabets_.stack_size();
        index /= alphabets_.stack_size();
        size_t sigma = index % alphabets_.tape_size();
        return {static_cast<StateId>(index / alphabets_.tape_size()), static_cast<SymbolId>(sigma),
                static_cast<SymbolId>(tau)};
    }

    /// Nonzero entries of δ(q1, σ, τ, ·, ·, ·) in transition order.
    std::span<const ColumnEntry> column(StateId q1, SymbolId sigma, SymbolId tau) const {
        return columns_.at(triple_index(q1, sigma, tau));
    }

    std::span<const ColumnEntry> column(size_t triple) const { return columns_.at(triple); }

    /// δ(q1, σ, τ, q, d, ω); zero for anything not stored.
    Complex amplitude(StateId q1, SymbolId sigma, SymbolId tau, StateId q, Direction d, const StackWord &w) const {
        for (const auto &e : column(q1, sigma, tau)) {
            if (e.to == q && e.dir == d && e.push == w) {
                return e.amp;
            }
        }
        return {};
    }

    /// Human-readable rendering of a transition key.
    std::string describe(const Transition &t) const {
        return "delta(" + state_name(t.from) + ", " + alphabets_.tape_name(t.input) + ", " +
               alphabets_.stack_name(t.stack_top) + ", " + state_name(t.to) + ", " + std::string(to_string(t.dir)) +
               ", " + (t.push.empty() ? std::string("eps") : alphabets_.format_stack_word(t.push)) + ")";
    }

  private:
    friend class SpecBuilder;

    static std::vector<StateId> members(const std::vector<bool> &flags) {
        std::vector<StateId> out;
        for (size_t i = 0; i < flags.size(); ++i) {
            if (flags[i]) {
                out.push_back(static_cast<StateId>(i));
            }
        }
        return out;
    }

    Kind kind_ = Kind::general;
    Alphabets alphabets_;
    std::vector<std::string> states_;
    StateId initial_ = 0;
    std::vector<bool> accepting_, rejecting_;
    std::vector<std::optional<Direction>> direction_;
    std::vector<Transition> transitions_;
    std::vector<std::vector<ColumnEntry>> columns_;
};

/// Name-based construction of a QpaSpec. Reserved symbols (#, $, Z0) may be
/// used in transitions but are never declared.
class SpecBuilder {
  public:
    explicit SpecBuilder(Kind kind) : kind_(kind) {}

    SpecBuilder &input_alphabet(std::vector<std::string> names) {
        input_ = std::move(names);
        return *this;
    }
    SpecBuilder &stack_alphabet(std::vector<std::string> names) {
        stack_ = std::move(names);
        return *this;
    }
    SpecBuilder &states(std::vector<std::string> names) {
        states_ = std::move(names);
        return *this;
    }
    SpecBuilder &initial(std::string name) {
        initial_ = std::move(name);
        return *this;
    }
    SpecBuilder &accepting(std::vector<std::string> names) {
        accepting_ = std::move(names);
        return *this;
    }
    SpecBuilder &rejecting(std::vector<std::string> names) {
        rejecting_ = std::move(names);
        return *this;
    }
    SpecBuilder &direction(const std::string &state, Direction d) {
        direction_[state] = d;
        return *this;
    }

    SpecBuilder &transition(std::string from, std::string input, std::string top, std::string to, Direction d,
                            std::vector<std::string> push, Amplitude amp) {
        pending_.push_back(Pending{std::move(from), std::move(input), std::move(top), std::move(to), d,
                                   std::move(push), std::move(amp)});
        return *this;
    }

    SpecBuilder &transition(std::string from, std::string input, std::string top, std::string to, Direction d,
                            std::vector<std::string> push, std::string_view amp = "1") {
        return transition(std::move(from), std::move(input), std::move(top), std::move(to), d, std::move(push),
                          Amplitude::parse(amp));
    }

    /// Simplified-automaton entry φ(from, input, top, to, push); the head
    /// direction is D(to), which must already be declared.
    SpecBuilder &phi(std::string from, std::string input, std::string top, std::string to,
                     std::vector<std::string> push, std::string_view amp = "1") {
        auto it = direction_.find(to);
        if (it == direction_.end()) {
            throw StructureError("no direction declared for state '" + to + "'");
        }
        return transition(std::move(from), std::move(input), std::move(top), std::move(to), it->second,
                          std::move(push), amp);
    }

    QpaSpec build() const {
        QpaSpec spec;
        spec.kind_ = kind_;
        spec.alphabets_ = Alphabets(input_, stack_);
        spec.states_ = states_;
        std::sort(spec.states_.begin(), spec.states_.end());
        if (spec.states_.empty()) {
            throw ParseError("an automaton needs at least one state");
        }
        for (size_t i = 0; i < spec.states_.size(); ++i) {
            if (spec.states_[i].empty() || detail::has_space(spec.states_[i])) {
                throw ParseError("state names must be nonempty and contain no whitespace");
            }
            if (i > 0 && spec.states_[i] == spec.states_[i - 1]) {
                throw ParseError("duplicate state '" + spec.states_[i] + "'");
            }
        }
        size_t n = spec.states_.size();
        spec.initial_ = spec.state_id(initial_);
        spec.accepting_.assign(n, false);
        spec.rejecting_.assign(n, false);
        for (const auto &s : accepting_) {
            spec.accepting_[spec.state_id(s)] = true;
        }
        for (const auto &s : rejecting_) {
            spec.rejecting_[spec.state_id(s)] = true;
        }
        spec.direction_.assign(n, std::nullopt);
        for (const auto &[s, d] : direction_) {
            spec.direction_[spec.state_id(s)] = d;
        }
        const auto &alpha = spec.alphabets_;
        for (const auto &p : pending_) {
            Transition t;
            t.from = spec.state_id(p.from);
            t.input = alpha.tape_id(p.input);
            t.stack_top = alpha.stack_id(p.top);
            t.to = spec.state_id(p.to);
            t.dir = p.dir;
            for (const auto &s : p.push) {
                t.push.push_back(alpha.stack_id(s));
            }
            t.amp = p.amp;
            spec.transitions_.push_back(std::move(t));
        }
        std::sort(spec.transitions_.begin(), spec.transitions_.end(),
                  [](const Transition &a, const Transition &b) { return a.key() < b.key(); });
        for (size_t i = 1; i < spec.transitions_.size(); ++i) {
            if (spec.transitions_[i].key() == spec.transitions_[i - 1].key()) {
                throw ParseError("duplicate transition " + spec.describe(spec.transitions_[i]));
            }
        }
        spec.columns_.assign(spec.num_triples(), {});
        for (const auto &t : spec.transitions_) {
            if (t.amp.value() != Complex{}) {
                spec.columns_[spec.triple_index(t.from, t.input, t.stack_top)].push_back(
                    ColumnEntry{t.to, t.dir, t.push, t.amp.value()});
            }
        }
        return spec;
    }

  private:
    struct Pending {
        std::string from, input, top, to;
        Direction dir;
        std::vector<std::string> push;
        Amplitude amp;
    };

    Kind kind_;
    std::vector<std::string> input_, stack_, states_;
    std::string initial_;
    std::vector<std::string> accepting_, rejecting_;
    std::map<std::string, Direction> direction_;
    std::vector<Pending> pending_;
};

/// Builder reproducing `spec` by name, for deriving modified automata.
inline SpecBuilder to_builder(const QpaSpec &spec, Kind kind) {
    const auto &alpha = spec.alphabets();
    SpecBuilder b(kind);
    b.input_alphabet(alpha.input_names()).stack_alphabet(alpha.stack_symbol_names()).states(spec.state_names());
    b.initial(spec.state_name(spec.initial()));
    std::vector<std::string> acc, rej;
    for (auto q : spec.accepting()) {
        acc.push_back(spec.state_name(q));
    }
    for (auto q : spec.rejecting()) {
        rej.push_back(spec.state_name(q));
    }
    b.accepting(acc).rejecting(rej);
    for (StateId q = 0; q < spec.num_states(); ++q) {
        if (auto d = spec.direction(q)) {
            b.direction(spec.state_name(q), *d);
        }
    }
    for (const auto &t : spec.transitions()) {
        std::vector<std::string> push;
        for (auto s : t.push) {
            push.push_back(alpha.stack_name(s));
        }
        b.transition(spec.state_name(t.from), alpha.tape_name(t.input), alpha.stack_name(t.stack_top),
                     spec.state_name(t.to), t.dir, push, t.amp);
    }
    return b;
}

/// The same table reinterpreted under another kind (e.g. a simplified
/// automaton viewed as a general one).
inline QpaSpec with_kind(const QpaSpec &spec, Kind kind) { return to_builder(spec, kind).build(); }

enum class StructureRule {
    push_too_long,         // |ω| > 2
    push_prefix_mismatch,  // |ω| = 2 and ω₁ ≠ τ
    base_removed,          // τ = Z0 and ω not Z0-prefixed
    base_pushed,           // Z0 anywhere but the bottom of ω
    direction_mismatch,    // simplified: d ≠ D(to)
    direction_missing,     // simplified: D not total
    amplitude_modulus,     // |amp| > 1 + tol
    reversible_amplitude,  // reversible: amp ≠ 1
    reversible_not_function,
    halting_overlap,  // Q_a ∩ Q_r ≠ ∅
};

inline std::string_view to_string(StructureRule r) {
    switch (r) {
        case StructureRule::push_too_long:
            return "push word longer than 2";
        case StructureRule::push_prefix_mismatch:
            return "ω₁ ≠ β";
        case StructureRule::base_removed:
            return "Z0 pop removes base";
        case StructureRule::base_pushed:
            return "Z0 pushed above the base";
        case StructureRule::direction_mismatch:
            return "direction differs from D(target)";
        case StructureRule::direction_missing:
            return "direction function not total";
        case StructureRule::amplitude_modulus:
            return "amplitude modulus exceeds 1";
        case StructureRule::reversible_amplitude:
            return "reversible amplitude is not 1";
        case StructureRule::reversible_not_function:
            return "reversible table has several entries for one (state, symbol, stack top)";
        case StructureRule::halting_overlap:
            return "state is both accepting and rejecting";
    }
    return "";
}

struct StructureViolation {
    StructureRule rule;
    std::string subject;  // offending key or state
};

/// Checks the transition-table restrictions and the kind-specific invariants.
/// An empty result means the spec is structurally valid.
inline std::vector<StructureViolation> validate_structure(const QpaSpec &spec, double tol = 1e-9) {
    std::vector<StructureViolation> out;
    const auto &alpha = spec.alphabets();
    const SymbolId base = alpha.base();
    for (StateId q = 0; q < spec.num_states(); ++q) {
        if (spec.is_accepting(q) && spec.is_rejecting(q)) {
            out.push_back({StructureRule::halting_overlap, spec.state_name(q)});
        }
        if (spec.kind() != Kind::general && !spec.direction(q)) {
            out.push_back({StructureRule::direction_missing, spec.state_name(q)});
        }
    }
    for (const auto &t : spec.transitions()) {
        auto report = [&](StructureRule r) { out.push_back({r, spec.describe(t)}); };
        const auto &w = t.push;
        if (w.size() > 2) {
            report(StructureRule::push_too_long);
        }
        if (w.size() == 2 && w[0] != t.stack_top) {
            report(StructureRule::push_prefix_mismatch);
        }
        if (t.stack_top == base) {
            if (w.empty() || w[0] != base) {
                report(StructureRule::base_removed);
            }
            if (std::find(w.begin() + (w.empty() ? 0 : 1), w.end(), base) != w.end()) {
                report(StructureRule::base_pushed);
            }
        } else if (std::find(w.begin(), w.end(), base) != w.end()) {
            report(StructureRule::base_pushed);
        }
        if (std::abs(t.amp.value()) > 1.0 + tol) {
            report(StructureRule::amplitude_modulus);
        }
        if (spec.kind() != Kind::general) {
            auto d = spec.direction(t.to);
            if (d && *d != t.dir && t.amp.value() != Complex{}) {
                report(StructureRule::direction_mismatch);
            }
        }
        if (spec.kind() == Kind::reversible && t.amp.value() != Complex{1.0, 0.0}) {
            report(StructureRule::reversible_amplitude);
        }
    }
    if (spec.kind() == Kind::reversible) {
        for (size_t i = 1; i < spec.transitions().size(); ++i) {
            const auto &a = spec.transitions()[i - 1];
            const auto &b = spec.transitions()[i];
            if (a.from == b.from && a.input == b.input && a.stack_top == b.stack_top) {
                out.push_back({StructureRule::reversible_not_function, spec.describe(b)});
            }
        }
    }
    return out;
}

/// Throws StructureError listing the first violations if the spec is invalid.
inline void require_valid_structure(const QpaSpec &spec) {
    auto v = validate_structure(spec);
    if (!v.empty()) {
        std::string msg = "spec is structurally invalid: " + std::string(to_string(v[0].rule)) + " at " + v[0].subject;
        if (v.size() > 1) {
            msg += " (and " + std::to_string(v.size() - 1) + " more)";
        }
        throw StructureError(msg);
    }
}

/// Every push word ω allowed after popping τ, ordered by length then symbol.
inline std::vector<StackWord> enumerate_push_words(SymbolId tau, const Alphabets &alpha) {
    if (tau >= alpha.stack_size()) {
        throw UnknownSymbol("unknown stack symbol id " + std::to_string(tau));
    }
    std::vector<StackWord> out;
    auto ts = alpha.stack_symbol_ids();
    if (tau == alpha.base()) {
        out.push_back({tau});
        for (auto t : ts) {
            out.push_back({tau, t});
        }
    } else {
        out.emplace_back();
        for (auto t : ts) {
            out.push_back({t});
        }
        for (auto t : ts) {
            out.push_back({tau, t});
        }
    }
    return out;
}

inline std::vector<StackWord> enumerate_push_words(std::string_view tau, const Alphabets &alpha) {
    return enumerate_push_words(alpha.stack_id(tau), alpha);
}

/// Name-addressed column accessor.
inline std::vector<ColumnEntry> transitions_from(const QpaSpec &spec, std::string_view q1, std::string_view sigma,
                                                 std::string_view tau) {
    auto col = spec.column(spec.state_id(q1), spec.alphabets().tape_id(sigma), spec.alphabets().stack_id(tau));
    return {col.begin(), col.end()};
}

}  // namespace qpa
