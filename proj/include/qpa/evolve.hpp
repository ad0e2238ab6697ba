#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpa/model.hpp"
#include "qpa/wellformed.hpp"

namespace qpa {

/// The framed input `# x $`.
class Tape {
  public:
    Tape(const Alphabets &alpha, std::string_view word) : Tape(alpha, alpha.parse_word(word)) {}

    Tape(const Alphabets &alpha, const std::vector<SymbolId> &word) {
        cells_.reserve(word.size() + 2);
        cells_.push_back(alpha.left_marker());
        for (auto s : word) {
            if (s >= alpha.tape_size() || !alpha.is_input(s)) {
                throw UnknownSymbol("tape symbol id " + std::to_string(s) + " is not an input symbol");
            }
            cells_.push_back(s);
        }
        cells_.push_back(alpha.right_marker());
    }

    size_t size() const { return cells_.size(); }
    size_t word_length() const { return cells_.size() - 2; }
    SymbolId operator[](size_t i) const { return cells_.at(i); }
    const std::vector<SymbolId> &cells() const { return cells_; }

  private:
    std::vector<SymbolId> cells_;
};

struct Configuration {
    StateId state = 0;
    size_t head = 0;
    StackWord stack;

    auto operator<=>(const Configuration &) const = default;
    bool operator==(const Configuration &) const = default;
};

inline std::string format_configuration(const QpaSpec &spec, const Configuration &c) {
    return "(" + spec.state_name(c.state) + ", " + std::to_string(c.head) + ", " +
           spec.alphabets().format_stack_word(c.stack) + ")";
}

/// Sparse vector over configurations, ordered deterministically.
class Superposition {
  public:
    using Map = std::map<Configuration, Complex>;

    Superposition() = default;
    explicit Superposition(Map amps) : amps_(std::move(amps)) {}

    Complex amplitude(const Configuration &c) const {
        auto it = amps_.find(c);
        return it == amps_.end() ? Complex{} : it->second;
    }

    void add(const Configuration &c, Complex a) { amps_[c] += a; }
    void set(const Configuration &c, Complex a) { amps_[c] = a; }

    double norm_squared() const {
        double s = 0;
        for (const auto &[c, a] : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    /// Drops entries with |α| < eps.
    void prune(double eps) {
        std::erase_if(amps_, [eps](const auto &kv) { return std::abs(kv.second) < eps; });
    }

    Superposition scaled(Complex k) const {
        Superposition out(*this);
        for (auto &[c, a] : out.amps_) {
            a *= k;
        }
        return out;
    }

    bool empty() const { return amps_.empty(); }
    size_t size() const { return amps_.size(); }
    const Map &entries() const { return amps_; }
    auto begin() const { return amps_.begin(); }
    auto end() const { return amps_.end(); }

  private:
    Map amps_;
};

inline Superposition operator+(const Superposition &a, const Superposition &b) {
    Superposition out(a);
    for (const auto &[c, v] : b) {
        out.add(c, v);
    }
    return out;
}

inline constexpr double kPruneEps = 1e-15;
inline constexpr double kHaltEps = 1e-12;

inline Superposition initial_superposition(const QpaSpec &spec, const Tape &tape) {
    (void)tape;
    Superposition psi;
    psi.set({spec.initial(), 0, {spec.alphabets().base()}}, 1.0);
    return psi;
}

inline Superposition initial_superposition(const QpaSpec &spec, std::string_view word) {
    return initial_superposition(spec, Tape(spec.alphabets(), word));
}

/// Successor of `c` along one table entry. Does not check the tape bound.
inline Configuration successor(const Configuration &c, const ColumnEntry &e) {
    Configuration next{e.to, c.head + (e.dir == Direction::advance ? 1 : 0), c.stack};
    next.stack.pop_back();
    next.stack.insert(next.stack.end(), e.push.begin(), e.push.end());
    return next;
}

/// One application of the evolution operator.
inline Superposition apply_evolution(const QpaSpec &spec, const Tape &tape, const Superposition &psi,
                                     double prune_eps = kPruneEps) {
    const SymbolId base = spec.alphabets().base();
    Superposition out;
    for (const auto &[c, alpha] : psi) {
        if (c.head >= tape.size() || c.stack.empty()) {
            throw std::logic_error("invalid configuration " + format_configuration(spec, c));
        }
        for (const auto &e : spec.column(c.state, tape[c.head], c.stack.back())) {
            Complex a = alpha * e.amp;
            if (e.dir == Direction::advance && c.head + 1 == tape.size()) {
                if (std::abs(a) >= prune_eps) {
                    throw TapeOverrun("branch " + format_configuration(spec, c) + " advances past the right end-marker");
                }
                continue;
            }
            Configuration next = successor(c, e);
            if (next.stack.empty() || next.stack.front() != base ||
                std::find(next.stack.begin() + 1, next.stack.end(), base) != next.stack.end()) {
                throw std::logic_error("stack base lost in " + format_configuration(spec, next));
            }
            out.add(next, a);
        }
    }
    out.prune(prune_eps);
    return out;
}

struct Measurement {
    double p_accept = 0;
    double p_reject = 0;
    Superposition residual;
};

/// Projects onto accepting / rejecting / non-halting subspaces. The residual
/// keeps its reduced norm.
inline Measurement measure(const QpaSpec &spec, const Superposition &psi) {
    Measurement m;
    for (const auto &[c, a] : psi) {
        if (spec.is_accepting(c.state)) {
            m.p_accept += std::norm(a);
        } else if (spec.is_rejecting(c.state)) {
            m.p_reject += std::norm(a);
        } else {
            m.residual.set(c, a);
        }
    }
    return m;
}

struct RecognitionResult {
    double p_accept = 0;
    double p_reject = 0;
    double p_nonhalt = 0;
    size_t steps = 0;
    bool halted = false;
};

struct StepSnapshot {
    size_t step = 0;
    Superposition state;  // after the evolution step, before measurement
    double p_accept_inc = 0;
    double p_reject_inc = 0;
    double p_accept_total = 0;
    double p_reject_total = 0;
    double residual_norm = 0;  // squared norm after measurement
};

struct RunOptions {
    std::optional<size_t> max_steps;  // default 20 (|w| + 2)
    double halt_eps = kHaltEps;
    double prune_eps = kPruneEps;
};

inline size_t default_max_steps(size_t word_length) { return 20 * (word_length + 2); }

/// Runs the measure-many recognition loop on a spec that has passed the
/// well-formedness suite (or was explicitly forced).
class Recognizer {
  public:
    explicit Recognizer(QpaSpec spec, bool force = false, const wellformed::CheckOptions &check = {})
        : spec_(std::move(spec)) {
        require_valid_structure(spec_);
        summary_ = wellformed::check_all(spec_, check);
        if (!summary_.passed() && !force) {
            std::string failed;
            for (auto c : summary_.failed()) {
                failed += (failed.empty() ? "" : ", ") + std::string(wellformed::to_string(c));
            }
            throw NotWellFormed("automaton fails well-formedness: " + failed);
        }
    }

    const QpaSpec &spec() const { return spec_; }
    const wellformed::ConditionSummary &summary() const { return summary_; }

    RecognitionResult run(std::string_view word, const RunOptions &opt = {}) const {
        RecognitionResult r;
        loop(word, opt, r, nullptr);
        return r;
    }

    RecognitionResult run(const std::vector<SymbolId> &word, const RunOptions &opt = {}) const {
        RecognitionResult r;
        loop(Tape(spec_.alphabets(), word), opt, r, nullptr);
        return r;
    }

    std::vector<StepSnapshot> trace(std::string_view word, const RunOptions &opt = {}) const {
        std::vector<StepSnapshot> out;
        RecognitionResult r;
        loop(word, opt, r, &out);
        return out;
    }

  private:
    void loop(std::string_view word, const RunOptions &opt, RecognitionResult &r,
              std::vector<StepSnapshot> *trace) const {
        loop(Tape(spec_.alphabets(), word), opt, r, trace);
    }

    void loop(const Tape &tape, const RunOptions &opt, RecognitionResult &r, std::vector<StepSnapshot> *trace) const {
        size_t limit = opt.max_steps.value_or(default_max_steps(tape.word_length()));
        Superposition psi = initial_superposition(spec_, tape);
        double residual = psi.norm_squared();
        while (r.steps < limit && residual >= opt.halt_eps) {
            Superposition next = apply_evolution(spec_, tape, psi, opt.prune_eps);
            Measurement m = measure(spec_, next);
            ++r.steps;
            r.p_accept += m.p_accept;
            r.p_reject += m.p_reject;
            residual = m.residual.norm_squared();
            if (trace) {
                trace->push_back({r.steps, std::move(next), m.p_accept, m.p_reject, r.p_accept, r.p_reject, residual});
            }
            psi = std::move(m.residual);
        }
        r.p_nonhalt = residual;
        r.halted = residual < opt.halt_eps;
    }

    QpaSpec spec_;
    wellformed::ConditionSummary summary_;
};

inline RecognitionResult recognize(const QpaSpec &spec, std::string_view word, const RunOptions &opt = {},
                                   bool force = false) {
    return Recognizer(spec, force).run(word, opt);
}

inline constexpr double kDecideSlack = 1e-12;

enum class Verdict { accepted, rejected, inconclusive };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::accepted:
            return "accepted";
        case Verdict::rejected:
            return "rejected";
        case Verdict::inconclusive:
            return "inconclusive";
    }
    return "";
}

/// With a threshold t in (1/2, 1]: accepted iff p_accept >= t, rejected iff
/// p_reject >= t, compared with a 1e-12 slack so that t = 1 admits rounding.
/// Without a threshold, a strict majority decides.
inline Verdict decide(const RecognitionResult &r, std::optional<double> threshold = std::nullopt) {
    if (!threshold) {
        if (r.p_accept > 0.5) {
            return Verdict::accepted;
        }
        return r.p_reject > 0.5 ? Verdict::rejected : Verdict::inconclusive;
    }
    double t = *threshold;
    if (!(t > 0.5 && t <= 1.0)) {
        throw std::invalid_argument("threshold must lie in (0.5, 1], got " + std::to_string(t));
    }
    if (r.p_accept + kDecideSlack >= t) {
        return Verdict::accepted;
    }
    return r.p_reject + kDecideSlack >= t ? Verdict::rejected : Verdict::inconclusive;
}

}  // namespace qpa
