#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qpa/model.hpp"

// Concrete automata: two reversible recognizers (L1, L2), two probabilistic
// ones built from comparator sub-machines (L3, L5), and two deliberately
// defective fixtures used to exercise the checkers.

namespace qpa::zoo {

struct ZooEntry {
    std::string name;
    std::string language;
    QpaSpec spec;
    std::function<bool(std::string_view)> oracle;
    double claimed_probability = 1.0;
};

/// One transition of a simplified table: φ(from, input, top, to, push) = amp.
struct PhiRule {
    std::string from, input, top, to;
    std::vector<std::string> push;
    std::string amp = "1";
};

/// A reversible sub-machine that compares the number of `x` and `y` symbols.
///
/// States, by role: `<prefix>0` scans (advance), `<prefix>1` finishes a pop
/// (stay), `<prefix>2` accepts, `<prefix>3` rejects. The stack holds `1`s while
/// x leads and `2`s while y leads. Rules for `#` leave every state unchanged.
struct ComparatorGadget {
    std::array<std::string, 4> states;
    std::vector<std::pair<std::string, Direction>> directions;
    std::vector<PhiRule> rules;

    const std::string &scan() const { return states[0]; }
    const std::string &accept() const { return states[2]; }
    const std::string &reject() const { return states[3]; }

    /// Declares directions and emits every rule not rejected by `skip`.
    void emit(SpecBuilder &b, const std::function<bool(const PhiRule &)> &skip = {}) const {
        for (const auto &[q, d] : directions) {
            b.direction(q, d);
        }
        for (const auto &r : rules) {
            if (!skip || !skip(r)) {
                b.phi(r.from, r.input, r.top, r.to, r.push, r.amp);
            }
        }
    }
};

namespace detail {

inline const std::string kZ{kStackBase};

inline size_t count(std::string_view w, char c) { return static_cast<size_t>(std::count(w.begin(), w.end(), c)); }

/// Rules of the four-state a/b counter. `printed_end_rule` selects the
/// right-marker rule for (q0, Z0): the unitary one keeps Z0, the printed
/// variant pushes an extra 1.
inline std::vector<PhiRule> counter_rules(bool printed_end_rule) {
    const std::string Z = kZ;
    std::vector<PhiRule> r;
    for (const char *q : {"q0", "q1", "q2", "q3"}) {
        for (const std::string &t : {Z, std::string("1"), std::string("2")}) {
            r.push_back({q, "#", t, q, {t}});
        }
    }
    r.insert(r.end(), {
                          {"q0", "a", Z, "q0", {Z, "1"}},
                          {"q0", "b", Z, "q0", {Z, "2"}},
                          {"q0", "$", Z, "q2", printed_end_rule ? std::vector<std::string>{Z, "1"}
                                                                : std::vector<std::string>{Z}},
                          {"q0", "a", "1", "q0", {"1", "1"}},
                          {"q0", "b", "1", "q1", {}},
                          {"q0", "$", "1", "q3", {"1"}},
                          {"q0", "a", "2", "q1", {}},
                          {"q0", "b", "2", "q0", {"2", "2"}},
                          {"q0", "$", "2", "q3", {"2"}},
                          {"q1", "a", Z, "q0", {Z}},
                          {"q1", "b", Z, "q0", {Z}},
                          {"q1", "a", "1", "q3", {"1", "2"}},
                          {"q1", "b", "1", "q0", {"1"}},
                          {"q1", "a", "2", "q0", {"2"}},
                          {"q1", "b", "2", "q3", {"2", "1"}},
                          {"q2", "a", Z, "q3", {Z, "2"}},
                          {"q2", "b", Z, "q3", {Z, "1"}},
                          {"q2", "$", Z, "q0", {Z}},
                          {"q2", "a", "1", "q2", {}},
                          {"q2", "b", "1", "q0", {"1", "2"}},
                          {"q2", "$", "1", "q0", {"1"}},
                          {"q2", "a", "2", "q0", {"2", "1"}},
                          {"q2", "b", "2", "q2", {}},
                          {"q2", "$", "2", "q0", {"2"}},
                          {"q3", "a", Z, "q3", {Z}},
                          {"q3", "b", Z, "q3", {Z}},
                          {"q3", "$", Z, "q3", {Z}},
                          {"q3", "a", "1", "q3", {"1"}},
                          {"q3", "b", "1", "q3", {"1", "1"}},
                          {"q3", "$", "1", "q2", {"1"}},
                          {"q3", "a", "2", "q3", {"2", "2"}},
                          {"q3", "b", "2", "q3", {"2"}},
                          {"q3", "$", "2", "q2", {"2"}},
                      });
    for (const std::string &t : {Z, std::string("1"), std::string("2")}) {
        r.push_back({"q1", "$", t, "q1", {t}});
    }
    return r;
}

inline const std::vector<std::pair<std::string, Direction>> kCounterDirections{
    {"q0", Direction::advance}, {"q1", Direction::stay}, {"q2", Direction::stay}, {"q3", Direction::stay}};

inline SpecBuilder counter_builder(bool printed_end_rule) {
    SpecBuilder b(Kind::reversible);
    b.input_alphabet({"a", "b"}).stack_alphabet({"1", "2"}).states({"q0", "q1", "q2", "q3"});
    b.initial("q0").accepting({"q2"}).rejecting({"q3"});
    for (const auto &[q, d] : kCounterDirections) {
        b.direction(q, d);
    }
    for (const auto &r : counter_rules(printed_end_rule)) {
        b.phi(r.from, r.input, r.top, r.to, r.push, r.amp);
    }
    return b;
}

}  // namespace detail

/// The a/b counter with its tape symbols renamed to `x`/`y`, states renamed to
/// `<prefix>0..3`, and every symbol of `ignore` read as a stack-preserving
/// identity step.
inline ComparatorGadget comparator_gadget(const std::string &x, const std::string &y,
                                          const std::vector<std::string> &ignore, const std::string &prefix = "q") {
    if (x == y) {
        throw StructureError("comparator symbols must differ, both are '" + x + "'");
    }
    std::set<std::string> seen{x, y};
    for (const auto &s : ignore) {
        if (!seen.insert(s).second) {
            throw StructureError("symbol '" + s + "' has more than one comparator role");
        }
    }
    auto state = [&](const std::string &q) { return prefix + q.substr(1); };
    auto symbol = [&](const std::string &s) { return s == "a" ? x : s == "b" ? y : s; };

    ComparatorGadget g;
    for (size_t i = 0; i < 4; ++i) {
        g.states[i] = prefix + std::to_string(i);
    }
    for (const auto &[q, d] : detail::kCounterDirections) {
        g.directions.push_back({state(q), d});
    }
    for (auto r : detail::counter_rules(false)) {
        r.from = state(r.from);
        r.to = state(r.to);
        r.input = symbol(r.input);
        g.rules.push_back(std::move(r));
    }
    for (const auto &s : ignore) {
        for (const auto &q : g.states) {
            for (const std::string &t : {detail::kZ, std::string("1"), std::string("2")}) {
                g.rules.push_back({q, s, t, q, {t}});
            }
        }
    }
    return g;
}

/// The gadget as a standalone reversible automaton over {x, y} ∪ ignore.
inline QpaSpec comparator_machine(const std::string &x, const std::string &y, const std::vector<std::string> &ignore,
                                  const std::string &prefix = "q") {
    auto g = comparator_gadget(x, y, ignore, prefix);
    std::vector<std::string> sigma{x, y};
    sigma.insert(sigma.end(), ignore.begin(), ignore.end());
    SpecBuilder b(Kind::reversible);
    b.input_alphabet(sigma).stack_alphabet({"1", "2"}).states({g.states.begin(), g.states.end()});
    b.initial(g.scan()).accepting({g.accept()}).rejecting({g.reject()});
    g.emit(b);
    return b.build();
}

/// Words over {0,1} ending in 1. Six states: q0/q1 track the last symbol and
/// push it, q2/q3 only exist to complete the unitary table, q4 rejects and q5
/// accepts at the right end-marker.
inline const ZooEntry &l1_rpa() {
    static const ZooEntry entry = [] {
        const std::string Z = detail::kZ;
        SpecBuilder b(Kind::reversible);
        b.input_alphabet({"0", "1"}).stack_alphabet({"0", "1"});
        b.states({"q0", "q1", "q2", "q3", "q4", "q5"}).initial("q0").accepting({"q5"}).rejecting({"q4"});
        b.direction("q0", Direction::advance).direction("q1", Direction::advance);
        for (const char *q : {"q2", "q3", "q4", "q5"}) {
            b.direction(q, Direction::stay);
        }
        const std::vector<std::string> delta{Z, "0", "1"};
        for (const auto &t : delta) {
            for (const char *q : {"q0", "q1", "q2", "q3", "q4", "q5"}) {
                b.phi(q, "#", t, q, {t});
            }
            b.phi("q0", "0", t, "q0", {t, "0"});
            b.phi("q1", "0", t, "q0", {t, "1"});
            b.phi("q0", "1", t, "q1", {t, "0"});
            b.phi("q1", "1", t, "q1", {t, "1"});
            b.phi("q0", "$", t, "q4", {t});
            b.phi("q1", "$", t, "q5", {t});
            b.phi("q2", "1", t, "q0", {t});
            b.phi("q3", "0", t, "q1", {t});
            b.phi("q2", "$", t, "q2", {t});
            b.phi("q3", "$", t, "q3", {t});
            for (const char *s : {"0", "1"}) {
                b.phi("q4", s, t, "q4", {t});
                b.phi("q5", s, t, "q5", {t});
            }
            b.phi("q4", "$", t, "q0", {t});
            b.phi("q5", "$", t, "q1", {t});
        }
        b.phi("q2", "0", Z, "q0", {Z});
        b.phi("q3", "1", Z, "q1", {Z});
        b.phi("q2", "0", "0", "q2", {});
        b.phi("q2", "0", "1", "q3", {});
        b.phi("q3", "1", "0", "q2", {});
        b.phi("q3", "1", "1", "q3", {});
        return ZooEntry{"l1", "(0,1)*1", b.build(), [](std::string_view w) { return !w.empty() && w.back() == '1'; },
                        1.0};
    }();
    return entry;
}

/// Words over {a,b} with as many a's as b's.
inline const ZooEntry &l2_rpa() {
    static const ZooEntry entry{"l2", "|w|_a = |w|_b", detail::counter_builder(false).build(),
                                [](std::string_view w) { return detail::count(w, 'a') == detail::count(w, 'b'); },
                                1.0};
    return entry;
}

/// Words over {a,b,c} with |w|_a = |w|_b = |w|_c, accepted with probability 2/3.
///
/// On `#` the start state S splits into three equal branches: an a/b
/// comparator (A*), a b/c comparator (B*) and an immediate reject (R). The
/// other two columns of the 3x3 block belong to the unreachable states X1, X2.
inline const ZooEntry &l3_qpa() {
    static const ZooEntry entry = [] {
        const std::string Z = detail::kZ;
        auto ga = comparator_gadget("a", "b", {"c"}, "A");
        auto gb = comparator_gadget("b", "c", {"a"}, "B");
        SpecBuilder b(Kind::simplified);
        b.input_alphabet({"a", "b", "c"}).stack_alphabet({"1", "2"});
        std::vector<std::string> states{"S", "X1", "X2", "R"};
        states.insert(states.end(), ga.states.begin(), ga.states.end());
        states.insert(states.end(), gb.states.begin(), gb.states.end());
        b.states(states).initial("S").accepting({ga.accept(), gb.accept()}).rejecting({ga.reject(), gb.reject(), "R"});
        for (const char *q : {"S", "X1", "X2", "R"}) {
            b.direction(q, Direction::stay);
        }
        auto entry_left_marker = [](const std::string &scan) {
            return [scan](const PhiRule &r) { return r.from == scan && r.input == "#"; };
        };
        ga.emit(b, entry_left_marker(ga.scan()));
        gb.emit(b, entry_left_marker(gb.scan()));
        for (const auto &t : {Z, std::string("1"), std::string("2")}) {
            b.phi("S", "#", t, "A0", {t}, "sqrt(1/3)");
            b.phi("S", "#", t, "B0", {t}, "sqrt(1/3)");
            b.phi("S", "#", t, "R", {t}, "sqrt(1/3)");
            b.phi("X1", "#", t, "A0", {t}, "sqrt(1/2)");
            b.phi("X1", "#", t, "B0", {t}, "-sqrt(1/2)");
            b.phi("X2", "#", t, "A0", {t}, "sqrt(1/6)");
            b.phi("X2", "#", t, "B0", {t}, "sqrt(1/6)");
            b.phi("X2", "#", t, "R", {t}, "-sqrt(2/3)");
            b.phi("A0", "#", t, "S", {t});
            b.phi("B0", "#", t, "X1", {t});
            b.phi("R", "#", t, "X2", {t});
            for (const char *q : {"S", "X1", "X2", "R"}) {
                for (const char *s : {"a", "b", "c", "$"}) {
                    b.phi(q, s, t, q, {t});
                }
            }
        }
        return ZooEntry{"l3", "|w|_a = |w|_b = |w|_c", b.build(),
                        [](std::string_view w) {
                            auto a = detail::count(w, 'a');
                            return a == detail::count(w, 'b') && a == detail::count(w, 'c');
                        },
                        2.0 / 3.0};
    }();
    return entry;
}

/// Words over {a,b,c} with |w|_a = |w|_b xor |w|_a = |w|_c, accepted with
/// probability 4/7.
///
/// On `#` the start state S branches into an a/b comparator (amplitude
/// √(2/7)), an a/c comparator (−√(2/7)) and an accepting state U (√(3/7)).
/// At `$` with an empty counter the two comparators meet in a Hadamard
/// block: accept = (A + C)/√2, reject = (A − C)/√2. Both comparators take
/// the same number of steps when they succeed, so if both do their accept
/// amplitudes cancel; if exactly one does, half its weight (1/7) is accepted.
inline const ZooEntry &l5_qpa() {
    static const ZooEntry entry = [] {
        const std::string Z = detail::kZ;
        auto ga = comparator_gadget("a", "b", {"c"}, "A");
        auto gc = comparator_gadget("a", "c", {"b"}, "C");
        SpecBuilder b(Kind::simplified);
        b.input_alphabet({"a", "b", "c"}).stack_alphabet({"1", "2"});
        std::vector<std::string> states{"S", "X1", "X2", "U"};
        states.insert(states.end(), ga.states.begin(), ga.states.end());
        states.insert(states.end(), gc.states.begin(), gc.states.end());
        b.states(states).initial("S").accepting({ga.accept(), "U"}).rejecting({ga.reject(), gc.accept(), gc.reject()});
        for (const char *q : {"S", "X1", "X2", "U"}) {
            b.direction(q, Direction::stay);
        }
        auto replaced = [&](const PhiRule &r) {
            bool meet = r.input == "$" && r.top == Z &&
                        (r.from == ga.scan() || r.from == gc.scan() || r.from == ga.accept() || r.from == gc.accept());
            bool entry = r.input == "#" && (r.from == ga.scan() || r.from == gc.scan());
            return meet || entry;
        };
        ga.emit(b, replaced);
        gc.emit(b, replaced);
        b.phi("A0", "$", Z, "A2", {Z}, "sqrt(1/2)");
        b.phi("A0", "$", Z, "C2", {Z}, "sqrt(1/2)");
        b.phi("C0", "$", Z, "A2", {Z}, "sqrt(1/2)");
        b.phi("C0", "$", Z, "C2", {Z}, "-sqrt(1/2)");
        b.phi("A2", "$", Z, "A0", {Z}, "sqrt(1/2)");
        b.phi("A2", "$", Z, "C0", {Z}, "sqrt(1/2)");
        b.phi("C2", "$", Z, "A0", {Z}, "sqrt(1/2)");
        b.phi("C2", "$", Z, "C0", {Z}, "-sqrt(1/2)");
        for (const auto &t : {Z, std::string("1"), std::string("2")}) {
            b.phi("S", "#", t, "A0", {t}, "sqrt(2/7)");
            b.phi("S", "#", t, "C0", {t}, "-sqrt(2/7)");
            b.phi("S", "#", t, "U", {t}, "sqrt(3/7)");
            b.phi("X1", "#", t, "A0", {t}, "sqrt(1/2)");
            b.phi("X1", "#", t, "C0", {t}, "sqrt(1/2)");
            b.phi("X2", "#", t, "A0", {t}, "sqrt(3/14)");
            b.phi("X2", "#", t, "C0", {t}, "-sqrt(3/14)");
            b.phi("X2", "#", t, "U", {t}, "-sqrt(4/7)");
            b.phi("A0", "#", t, "S", {t});
            b.phi("C0", "#", t, "X1", {t});
            b.phi("U", "#", t, "X2", {t});
            for (const char *q : {"S", "X1", "X2", "U"}) {
                for (const char *s : {"a", "b", "c", "$"}) {
                    b.phi(q, s, t, q, {t});
                }
            }
        }
        return ZooEntry{"l5", "|w|_a = |w|_b xor |w|_a = |w|_c", b.build(),
                        [](std::string_view w) {
                            auto a = detail::count(w, 'a');
                            return (a == detail::count(w, 'b')) != (a == detail::count(w, 'c'));
                        },
                        4.0 / 7.0};
    }();
    return entry;
}

inline std::vector<std::string> names() { return {"l1", "l2", "l3", "l5"}; }

inline const ZooEntry &get(std::string_view name) {
    if (name == "l1") {
        return l1_rpa();
    }
    if (name == "l2") {
        return l2_rpa();
    }
    if (name == "l3") {
        return l3_qpa();
    }
    if (name == "l5") {
        return l5_qpa();
    }
    throw UnknownSymbol("no zoo entry named '" + std::string(name) + "'");
}

/// One state that always advances and pushes a 1. Every column is a unit
/// vector and the columns are orthogonal, but no configuration with a bare
/// Z0 stack has a preimage, so the evolution is not unitary.
inline QpaSpec nonunitary_example() {
    const std::string Z = detail::kZ;
    SpecBuilder b(Kind::general);
    b.input_alphabet({"1"}).stack_alphabet({"1"}).states({"q"}).initial("q");
    for (const char *s : {"#", "1", "$"}) {
        b.transition("q", s, Z, "q", Direction::advance, {Z, "1"});
        b.transition("q", s, "1", "q", Direction::advance, {"1", "1"});
    }
    return b.build();
}

/// The a/b counter with φ(q0, $, Z0, q2, Z0 1) in place of φ(q0, $, Z0, q2, Z0).
/// (q0, Z0) and (q3, Z0 1) then share the image (q2, Z0 1) and (q2, Z0) has no
/// preimage on `$`.
inline QpaSpec l2_as_printed() { return detail::counter_builder(true).build(); }

struct Fixture {
    std::string name;
    std::string description;
    std::function<QpaSpec()> make;
};

inline std::vector<Fixture> fixtures() {
    return {
        {"nonunitary-example", "orthonormal columns, rows with bare Z0 stack have norm 0", nonunitary_example},
        {"l2-printed", "a/b counter with the right-marker rule pushing an extra 1", l2_as_printed},
    };
}

}  // namespace qpa::zoo
