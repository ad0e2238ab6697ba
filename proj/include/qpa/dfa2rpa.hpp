#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qpa/model.hpp"

// DFA -> reversible pushdown automaton.
//
// Each DFA state q_i gets a primed twin q'_i. Unprimed states advance and push
// the index of the state they leave, so the stack records the run and every
// step is invertible. Primed states stay; on `$` the machine moves q_i to q'_i,
// which accepts or rejects. The remaining primed rules only complete the
// table to a bijection.

namespace qpa::dfa {

struct Dfa {
    std::vector<std::string> states;  // declaration order defines the stack index
    std::vector<std::string> alphabet;
    std::string initial;
    std::vector<std::string> finals;
    std::map<std::pair<std::string, std::string>, std::string> delta;  // (state, symbol) -> state

    Dfa &transition(const std::string &from, const std::string &symbol, const std::string &to) {
        if (!delta.emplace(std::pair{from, symbol}, to).second) {
            throw DfaError("duplicate transition from '" + from + "' on '" + symbol + "'");
        }
        return *this;
    }

    size_t index(const std::string &state) const {
        for (size_t i = 0; i < states.size(); ++i) {
            if (states[i] == state) {
                return i;
            }
        }
        throw DfaError("unknown DFA state '" + state + "'");
    }

    const std::string &next(const std::string &state, const std::string &symbol) const {
        auto it = delta.find({state, symbol});
        if (it == delta.end()) {
            throw DfaError("no transition from '" + state + "' on '" + symbol + "'");
        }
        return it->second;
    }
};

/// Rejects empty, partial, or inconsistent automata.
inline void validate(const Dfa &d) {
    if (d.states.empty()) {
        throw DfaError("a DFA needs at least one state");
    }
    std::set<std::string> states(d.states.begin(), d.states.end());
    if (states.size() != d.states.size()) {
        throw DfaError("duplicate DFA state");
    }
    for (const auto &s : d.states) {
        if (s.empty() || detail::has_space(s)) {
            throw DfaError("DFA state names must be nonempty and contain no whitespace");
        }
    }
    try {
        detail::check_symbol_names(d.alphabet, "input");
    } catch (const Error &e) {
        throw DfaError(e.what());
    }
    if (!states.count(d.initial)) {
        throw DfaError("initial state '" + d.initial + "' is not a DFA state");
    }
    for (const auto &f : d.finals) {
        if (!states.count(f)) {
            throw DfaError("final state '" + f + "' is not a DFA state");
        }
    }
    std::set<std::string> symbols(d.alphabet.begin(), d.alphabet.end());
    for (const auto &[key, to] : d.delta) {
        if (!states.count(key.first) || !states.count(to)) {
            throw DfaError("transition mentions an unknown state: " + key.first + " -> " + to);
        }
        if (!symbols.count(key.second)) {
            throw DfaError("transition on unknown symbol '" + key.second + "'");
        }
    }
    for (const auto &q : d.states) {
        for (const auto &s : d.alphabet) {
            if (!d.delta.count({q, s})) {
                throw DfaError("DFA is partial: no transition from '" + q + "' on '" + s + "'");
            }
        }
    }
}

/// Classical run of the DFA.
inline bool simulate(const Dfa &d, const std::vector<std::string> &word) {
    validate(d);
    std::string q = d.initial;
    for (const auto &s : word) {
        if (std::find(d.alphabet.begin(), d.alphabet.end(), s) == d.alphabet.end()) {
            throw UnknownSymbol("symbol '" + s + "' is not in the DFA alphabet");
        }
        q = d.next(q, s);
    }
    return std::find(d.finals.begin(), d.finals.end(), q) != d.finals.end();
}

inline bool simulate(const Dfa &d, std::string_view word) {
    return simulate(d, qpa::detail::tokenize(word, d.alphabet, "input"));
}

/// Names of the primed twins, in DFA declaration order. A name collision with
/// an existing state gets further primes.
inline std::vector<std::string> primed_names(const Dfa &d) {
    std::set<std::string> taken(d.states.begin(), d.states.end());
    std::vector<std::string> out;
    for (const auto &q : d.states) {
        std::string p = q + "'";
        while (taken.count(p)) {
            p += "'";
        }
        taken.insert(p);
        out.push_back(p);
    }
    return out;
}

/// Stack symbol for DFA state i.
inline std::string index_symbol(size_t i) { return std::to_string(i); }

inline QpaSpec compile(const Dfa &d) {
    validate(d);
    const size_t n = d.states.size();
    const std::string Z{kStackBase};
    auto primed = primed_names(d);

    std::vector<std::string> indices;
    for (size_t i = 0; i < n; ++i) {
        indices.push_back(index_symbol(i));
    }
    std::vector<std::string> all_states = d.states;
    all_states.insert(all_states.end(), primed.begin(), primed.end());
    std::vector<std::string> accepting, rejecting;
    for (size_t i = 0; i < n; ++i) {
        bool final = std::find(d.finals.begin(), d.finals.end(), d.states[i]) != d.finals.end();
        (final ? accepting : rejecting).push_back(primed[i]);
    }

    SpecBuilder b(Kind::reversible);
    b.input_alphabet(d.alphabet).stack_alphabet(indices).states(all_states);
    b.initial(d.initial).accepting(accepting).rejecting(rejecting);
    for (size_t i = 0; i < n; ++i) {
        b.direction(d.states[i], Direction::advance);
        b.direction(primed[i], Direction::stay);
    }
    std::vector<std::string> delta_syms{Z};
    delta_syms.insert(delta_syms.end(), indices.begin(), indices.end());

    for (size_t i = 0; i < n; ++i) {
        const auto &qi = d.states[i];
        for (const auto &sigma : d.alphabet) {
            // advance and remember where we came from
            for (const auto &tau : delta_syms) {
                b.phi(qi, sigma, tau, d.next(qi, sigma), {tau, indices[i]});
            }
        }
    }
    for (size_t j = 0; j < n; ++j) {
        for (const auto &sigma : d.alphabet) {
            for (size_t i = 0; i < n; ++i) {
                if (d.next(d.states[i], sigma) == d.states[j]) {
                    b.phi(primed[j], sigma, indices[i], primed[i], {});  // undo the push that led here
                } else {
                    b.phi(primed[j], sigma, indices[i], d.states[j], {indices[i]});
                }
            }
            b.phi(primed[j], sigma, Z, d.states[j], {Z});
        }
    }
    for (size_t i = 0; i < n; ++i) {
        for (const auto &tau : delta_syms) {
            b.phi(d.states[i], "#", tau, d.states[i], {tau});
            b.phi(primed[i], "#", tau, primed[i], {tau});
            b.phi(d.states[i], "$", tau, primed[i], {tau});  // decide at the end-marker
            b.phi(primed[i], "$", tau, d.states[i], {tau});
        }
    }
    return b.build();
}

}  // namespace qpa::dfa
