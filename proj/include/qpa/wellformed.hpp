#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "qpa/model.hpp"

// Well-formedness of a QPA transition table.
//
// Each condition is a finite sum over the table: the push words ω range over
// the legal set for the popped symbol (|ω| <= 2), so every quantifier domain
// is finite. Norm conditions compare a sum to 1; orthogonality and
// separability conditions compare an inner product to 0. A report carries the
// quantifier instantiation (`witness`) and the absolute deviation from target.
//
// General suite:    LPC, OCV, RVN, SEP1a, SEP1b, SEP2, SEP3a, SEP3b
// Simplified suite: LPC2, OCV2, RVN2, SEP_a, SEP_b, evaluated on
//                   φ(q1, σ, τ, q, ω) = δ(q1, σ, τ, q, D(q), ω).

namespace qpa::wellformed {

enum class Condition { LPC, OCV, RVN, SEP1a, SEP1b, SEP2, SEP3a, SEP3b, LPC2, OCV2, RVN2, SEP_a, SEP_b };

inline std::string_view to_string(Condition c) {
    switch (c) {
        case Condition::LPC:
            return "LPC";
        case Condition::OCV:
            return "OCV";
        case Condition::RVN:
            return "RVN";
        case Condition::SEP1a:
            return "SEP1a";
        case Condition::SEP1b:
            return "SEP1b";
        case Condition::SEP2:
            return "SEP2";
        case Condition::SEP3a:
            return "SEP3a";
        case Condition::SEP3b:
            return "SEP3b";
        case Condition::LPC2:
            return "LPC2";
        case Condition::OCV2:
            return "OCV2";
        case Condition::RVN2:
            return "RVN2";
        case Condition::SEP_a:
            return "SEP_a";
        case Condition::SEP_b:
            return "SEP_b";
    }
    return "";
}

enum class Suite { general, simplified };

inline constexpr std::array<Condition, 8> kGeneralSuite{Condition::LPC,   Condition::OCV,   Condition::RVN,
                                                        Condition::SEP1a, Condition::SEP1b, Condition::SEP2,
                                                        Condition::SEP3a, Condition::SEP3b};
inline constexpr std::array<Condition, 5> kSimplifiedSuite{Condition::LPC2, Condition::OCV2, Condition::RVN2,
                                                           Condition::SEP_a, Condition::SEP_b};

struct ConditionReport {
    Condition condition;
    std::vector<std::string> witness;
    double residual = 0;
};

struct CheckOptions {
    double tolerance = 1e-9;
    size_t max_reports = 100;
};

struct ConditionOutcome {
    Condition condition;
    size_t violations = 0;
    double worst_residual = 0;              // over every evaluated tuple, violating or not
    std::vector<ConditionReport> reports;  // first `max_reports` violations

    bool passed() const { return violations == 0; }
};

struct ConditionSummary {
    Suite suite = Suite::general;
    std::vector<ConditionOutcome> outcomes;

    bool passed() const {
        return std::all_of(outcomes.begin(), outcomes.end(), [](const auto &o) { return o.passed(); });
    }

    double worst_residual() const {
        double w = 0;
        for (const auto &o : outcomes) {
            w = std::max(w, o.worst_residual);
        }
        return w;
    }

    size_t total_violations() const {
        size_t n = 0;
        for (const auto &o : outcomes) {
            n += o.violations;
        }
        return n;
    }

    const ConditionOutcome *find(Condition c) const {
        for (const auto &o : outcomes) {
            if (o.condition == c) {
                return &o;
            }
        }
        return nullptr;
    }

    std::vector<Condition> failed() const {
        std::vector<Condition> out;
        for (const auto &o : outcomes) {
            if (!o.passed()) {
                out.push_back(o.condition);
            }
        }
        return out;
    }
};

namespace detail {

// Witness slots are ids; kind tags say how to render each slot.
enum class Slot : std::uint8_t { state, tape, stack, direction };

using Tuple = std::array<std::uint32_t, 8>;

/// The transition table seen by the kernels. In simplified mode the direction
/// is folded into the target state, so every entry carries d = stay.
class TableView {
  public:
    struct Entry {
        StateId to;
        Direction dir;
        StackWord push;
        Complex amp;
    };

    struct Hit {
        size_t triple;
        Complex amp;
    };

    TableView(const QpaSpec &spec, bool simplified) : spec_(spec) {
        entries_.resize(spec.num_triples());
        for (size_t t = 0; t < spec.num_triples(); ++t) {
            for (const auto &e : spec.column(t)) {
                if (simplified) {
                    if (spec.direction(e.to) != e.dir) {
                        throw StructureError("entry disagrees with the direction function; not a simplified automaton");
                    }
                    entries_[t].push_back({e.to, Direction::stay, e.push, e.amp});
                } else {
                    entries_[t].push_back({e.to, e.dir, e.push, e.amp});
                }
            }
        }
        for (size_t t = 0; t < entries_.size(); ++t) {
            auto [q, sigma, tau] = spec.triple_at(t);
            for (const auto &e : entries_[t]) {
                index_[{sigma, e.to, e.dir, e.push}].push_back({t, e.amp});
            }
        }
    }

    const QpaSpec &spec() const { return spec_; }
    const std::vector<Entry> &column(size_t t) const { return entries_[t]; }
    size_t num_triples() const { return entries_.size(); }

    /// Columns with input symbol `sigma` that hold an entry (to, dir, push).
    const std::vector<Hit> &hits(SymbolId sigma, StateId to, Direction dir, const StackWord &push) const {
        auto it = index_.find({sigma, to, dir, push});
        return it == index_.end() ? empty_ : it->second;
    }

  private:
    const QpaSpec &spec_;
    std::vector<std::vector<Entry>> entries_;
    std::map<std::tuple<SymbolId, StateId, Direction, StackWord>, std::vector<Hit>> index_;
    std::vector<Hit> empty_;
};

class Collector {
  public:
    Collector(const QpaSpec &spec, Condition c, std::vector<Slot> slots, const CheckOptions &opt)
        : spec_(spec), slots_(std::move(slots)), opt_(opt) {
        out_.condition = c;
    }

    /// Records a sum whose target is `target` (0 or 1).
    void add(const Tuple &t, Complex sum, double target) {
        double residual = std::abs(sum - Complex(target, 0.0));
        out_.worst_residual = std::max(out_.worst_residual, residual);
        if (residual > opt_.tolerance) {
            ++out_.violations;
            if (out_.reports.size() < opt_.max_reports) {
                out_.reports.push_back({out_.condition, render(t), residual});
            }
        }
    }

    ConditionOutcome take() { return std::move(out_); }

  private:
    std::vector<std::string> render(const Tuple &t) const {
        std::vector<std::string> w;
        const auto &alpha = spec_.alphabets();
        for (size_t i = 0; i < slots_.size(); ++i) {
            switch (slots_[i]) {
                case Slot::state:
                    w.push_back(spec_.state_name(t[i]));
                    break;
                case Slot::tape:
                    w.push_back(alpha.tape_name(t[i]));
                    break;
                case Slot::stack:
                    w.push_back(alpha.stack_name(t[i]));
                    break;
                case Slot::direction:
                    w.emplace_back(to_string(static_cast<Direction>(t[i])));
                    break;
            }
        }
        return w;
    }

    const QpaSpec &spec_;
    std::vector<Slot> slots_;
    const CheckOptions &opt_;
    ConditionOutcome out_;
};

inline Tuple triple_tuple(const QpaSpec &spec, size_t c1, size_t c2) {
    auto [q1, s1, t1] = spec.triple_at(c1);
    auto [q2, s2, t2] = spec.triple_at(c2);
    return {q1, s1, t1, q2, s2, t2, 0, 0};
}

constexpr Slot S = Slot::state, G = Slot::tape, K = Slot::stack;

inline ConditionOutcome local_probability(const TableView &v, Condition c, const CheckOptions &opt) {
    Collector col(v.spec(), c, {S, G, K}, opt);
    for (size_t t = 0; t < v.num_triples(); ++t) {
        double sum = 0;
        for (const auto &e : v.column(t)) {
            sum += std::norm(e.amp);
        }
        auto [q, s, tau] = v.spec().triple_at(t);
        col.add({q, s, tau}, sum, 1.0);
    }
    return col.take();
}

inline ConditionOutcome column_orthogonality(const TableView &v, Condition c, const CheckOptions &opt) {
    std::map<std::pair<size_t, size_t>, Complex> acc;
    for (size_t t1 = 0; t1 < v.num_triples(); ++t1) {
        auto sigma = std::get<1>(v.spec().triple_at(t1));
        for (const auto &e : v.column(t1)) {
            for (const auto &h : v.hits(sigma, e.to, e.dir, e.push)) {
                if (h.triple > t1) {
                    acc[{t1, h.triple}] += std::conj(e.amp) * h.amp;
                }
            }
        }
    }
    Collector col(v.spec(), c, {S, G, K, S, G, K}, opt);
    for (const auto &[k, sum] : acc) {
        col.add(triple_tuple(v.spec(), k.first, k.second), sum, 0.0);
    }
    return col.take();
}

/// Separability over column pairs. `d1`/`d2` are the direction of the first
/// and second factor; `any_sigma` drops the shared-input-symbol requirement.
/// Part a) sums δ*(c1,q,d1,τ) δ(c2,q,d2,τ3 τ) + δ*(c1,q,d1,ε) δ(c2,q,d2,τ3);
/// part b) sums δ*(c1,q,d1,ε) δ(c2,q,d2,τ2 τ3).
inline void separability(const TableView &v, Direction d1, Direction d2, bool any_sigma,
                         std::map<Tuple, Complex> &part_a, std::map<Tuple, Complex> &part_b) {
    const auto &spec = v.spec();
    const auto &alpha = spec.alphabets();
    const auto nG = static_cast<SymbolId>(alpha.tape_size());
    const auto nD = static_cast<SymbolId>(alpha.stack_size());
    for (size_t c1 = 0; c1 < v.num_triples(); ++c1) {
        auto sigma1 = std::get<1>(spec.triple_at(c1));
        for (const auto &e : v.column(c1)) {
            if (e.dir != d1 || e.push.size() > 1) {
                continue;
            }
            for (SymbolId sigma2 = 0; sigma2 < nG; ++sigma2) {
                if (!any_sigma && sigma2 != sigma1) {
                    continue;
                }
                for (SymbolId tau3 = 0; tau3 < nD; ++tau3) {
                    StackWord w2 = e.push.empty() ? StackWord{tau3} : StackWord{tau3, e.push[0]};
                    for (const auto &h : v.hits(sigma2, e.to, d2, w2)) {
                        Tuple k = triple_tuple(spec, c1, h.triple);
                        k[6] = tau3;
                        k[7] = static_cast<std::uint32_t>(d1);
                        part_a[k] += std::conj(e.amp) * h.amp;
                    }
                    if (!e.push.empty()) {
                        continue;
                    }
                    for (SymbolId tau2 = 0; tau2 < nD; ++tau2) {
                        for (const auto &h : v.hits(sigma2, e.to, d2, StackWord{tau2, tau3})) {
                            if (std::get<2>(spec.triple_at(h.triple)) != tau2) {
                                continue;
                            }
                            Tuple k = triple_tuple(spec, c1, h.triple);
                            k[6] = tau3;
                            k[7] = static_cast<std::uint32_t>(d1);
                            part_b[k] += std::conj(e.amp) * h.amp;
                        }
                    }
                }
            }
        }
    }
}

inline ConditionOutcome collect_zero(const QpaSpec &spec, Condition c, std::vector<Slot> slots,
                                     const std::map<Tuple, Complex> &acc, const CheckOptions &opt) {
    Collector col(spec, c, std::move(slots), opt);
    for (const auto &[k, sum] : acc) {
        col.add(k, sum, 0.0);
    }
    return col.take();
}

inline std::pair<ConditionOutcome, ConditionOutcome> separability_one(const TableView &v, Condition ca, Condition cb,
                                                                      const CheckOptions &opt) {
    std::map<Tuple, Complex> a, b;
    for (auto d : kDirections) {
        separability(v, d, d, false, a, b);
    }
    // Direction slot is not part of the SEP1 quantifier; fold it away.
    auto fold = [](const std::map<Tuple, Complex> &m) {
        std::map<Tuple, Complex> out;
        for (const auto &[k, s] : m) {
            Tuple key = k;
            key[7] = 0;
            out[key] += s;
        }
        return out;
    };
    std::vector<Slot> slots{S, G, K, S, G, K, K};
    return {collect_zero(v.spec(), ca, slots, fold(a), opt), collect_zero(v.spec(), cb, slots, fold(b), opt)};
}

inline ConditionOutcome separability_two(const TableView &v, const CheckOptions &opt) {
    const auto &spec = v.spec();
    const auto nG = static_cast<SymbolId>(spec.alphabets().tape_size());
    std::map<Tuple, Complex> acc;
    for (size_t c1 = 0; c1 < v.num_triples(); ++c1) {
        for (const auto &e : v.column(c1)) {
            if (e.dir != Direction::stay) {
                continue;
            }
            for (SymbolId sigma2 = 0; sigma2 < nG; ++sigma2) {
                for (const auto &h : v.hits(sigma2, e.to, Direction::advance, e.push)) {
                    acc[triple_tuple(spec, c1, h.triple)] += std::conj(e.amp) * h.amp;
                }
            }
        }
    }
    return collect_zero(spec, Condition::SEP2, {S, G, K, S, G, K}, acc, opt);
}

inline std::pair<ConditionOutcome, ConditionOutcome> separability_three(const TableView &v, const CheckOptions &opt) {
    std::map<Tuple, Complex> a, b;
    separability(v, Direction::stay, Direction::advance, true, a, b);
    separability(v, Direction::advance, Direction::stay, true, a, b);
    std::vector<Slot> slots{S, G, K, S, G, K, K, Slot::direction};
    return {collect_zero(v.spec(), Condition::SEP3a, slots, a, opt),
            collect_zero(v.spec(), Condition::SEP3b, slots, b, opt)};
}

/// Squared amplitudes into each target state, split by source symbol and
/// direction, restricted to entries whose push word is ε, τ2 or τ1 τ2.
struct RowSums {
    // [dir][sigma][tau1][tau2]
    std::vector<double> data;
    size_t nG, nD;

    double &at(Direction d, SymbolId sigma, SymbolId t1, SymbolId t2) {
        return data[((static_cast<size_t>(d) * nG + sigma) * nD + t1) * nD + t2];
    }
};

inline std::vector<RowSums> row_sums(const TableView &v) {
    const auto &spec = v.spec();
    size_t nG = spec.alphabets().tape_size(), nD = spec.alphabets().stack_size();
    std::vector<RowSums> rows(spec.num_states(), RowSums{std::vector<double>(2 * nG * nD * nD, 0.0), nG, nD});
    for (size_t t = 0; t < v.num_triples(); ++t) {
        auto sigma = std::get<1>(spec.triple_at(t));
        for (const auto &e : v.column(t)) {
            double p = std::norm(e.amp);
            for (SymbolId t1 = 0; t1 < nD; ++t1) {
                for (SymbolId t2 = 0; t2 < nD; ++t2) {
                    const auto &w = e.push;
                    bool match = w.empty() || (w.size() == 1 && w[0] == t2) ||
                                 (w.size() == 2 && w[0] == t1 && w[1] == t2);
                    if (match) {
                        rows[e.to].at(e.dir, sigma, t1, t2) += p;
                    }
                }
            }
        }
    }
    return rows;
}

inline ConditionOutcome row_norm_general(const TableView &v, const CheckOptions &opt) {
    const auto &spec = v.spec();
    auto rows = row_sums(v);
    auto nG = static_cast<SymbolId>(spec.alphabets().tape_size());
    auto nD = static_cast<SymbolId>(spec.alphabets().stack_size());
    Collector col(spec, Condition::RVN, {S, G, G, K, K}, opt);
    for (StateId q1 = 0; q1 < spec.num_states(); ++q1) {
        for (SymbolId s1 = 0; s1 < nG; ++s1) {
            for (SymbolId s2 = 0; s2 < nG; ++s2) {
                for (SymbolId t1 = 0; t1 < nD; ++t1) {
                    for (SymbolId t2 = 0; t2 < nD; ++t2) {
                        double sum =
                            rows[q1].at(Direction::advance, s1, t1, t2) + rows[q1].at(Direction::stay, s2, t1, t2);
                        col.add({q1, s1, s2, t1, t2}, sum, 1.0);
                    }
                }
            }
        }
    }
    return col.take();
}

inline ConditionOutcome row_norm_simplified(const TableView &v, const CheckOptions &opt) {
    const auto &spec = v.spec();
    auto rows = row_sums(v);
    auto nG = static_cast<SymbolId>(spec.alphabets().tape_size());
    auto nD = static_cast<SymbolId>(spec.alphabets().stack_size());
    Collector col(spec, Condition::RVN2, {S, G, K, K}, opt);
    for (StateId q1 = 0; q1 < spec.num_states(); ++q1) {
        for (SymbolId s1 = 0; s1 < nG; ++s1) {
            for (SymbolId t1 = 0; t1 < nD; ++t1) {
                for (SymbolId t2 = 0; t2 < nD; ++t2) {
                    col.add({q1, s1, t1, t2}, rows[q1].at(Direction::stay, s1, t1, t2), 1.0);
                }
            }
        }
    }
    return col.take();
}

}  // namespace detail

/// Σ_{q,d,ω} |δ(q1,σ1,τ1,q,d,ω)|² = 1 for every (q1,σ1,τ1).
inline std::vector<ConditionReport> check_local_probability(const QpaSpec &spec, const CheckOptions &opt = {}) {
    require_valid_structure(spec);
    return detail::local_probability(detail::TableView(spec, false), Condition::LPC, opt).reports;
}

/// Columns sharing an input symbol are orthogonal.
inline std::vector<ConditionReport> check_column_orthogonality(const QpaSpec &spec, const CheckOptions &opt = {}) {
    require_valid_structure(spec);
    return detail::column_orthogonality(detail::TableView(spec, false), Condition::OCV, opt).reports;
}

/// Every row of the evolution, addressed by (q1, σ1, σ2, τ1, τ2), has norm 1.
/// Degenerate tuples (σ1 = σ2, τ1 = τ2) are included.
inline std::vector<ConditionReport> check_row_norm(const QpaSpec &spec, const CheckOptions &opt = {}) {
    require_valid_structure(spec);
    return detail::row_norm_general(detail::TableView(spec, false), opt).reports;
}

/// SEP1a, SEP1b, SEP2, SEP3a, SEP3b in that order.
inline std::vector<ConditionReport> check_separability(const QpaSpec &spec, const CheckOptions &opt = {}) {
    require_valid_structure(spec);
    detail::TableView v(spec, false);
    std::vector<ConditionReport> out;
    auto append = [&](ConditionOutcome o) { out.insert(out.end(), o.reports.begin(), o.reports.end()); };
    auto [s1a, s1b] = detail::separability_one(v, Condition::SEP1a, Condition::SEP1b, opt);
    auto [s3a, s3b] = detail::separability_three(v, opt);
    append(std::move(s1a));
    append(std::move(s1b));
    append(detail::separability_two(v, opt));
    append(std::move(s3a));
    append(std::move(s3b));
    return out;
}

inline ConditionSummary check_general(const QpaSpec &spec, const CheckOptions &opt = {}) {
    require_valid_structure(spec);
    detail::TableView v(spec, false);
    ConditionSummary s{Suite::general, {}};
    s.outcomes.push_back(detail::local_probability(v, Condition::LPC, opt));
    s.outcomes.push_back(detail::column_orthogonality(v, Condition::OCV, opt));
    s.outcomes.push_back(detail::row_norm_general(v, opt));
    auto [s1a, s1b] = detail::separability_one(v, Condition::SEP1a, Condition::SEP1b, opt);
    s.outcomes.push_back(std::move(s1a));
    s.outcomes.push_back(std::move(s1b));
    s.outcomes.push_back(detail::separability_two(v, opt));
    auto [s3a, s3b] = detail::separability_three(v, opt);
    s.outcomes.push_back(std::move(s3a));
    s.outcomes.push_back(std::move(s3b));
    return s;
}

/// The simplified suite. Requires a total direction function that every
/// nonzero entry agrees with.
inline ConditionSummary check_simplified_summary(const QpaSpec &spec, const CheckOptions &opt = {}) {
    require_valid_structure(spec);
    if (!spec.has_total_direction()) {
        throw StructureError("the simplified conditions need a direction for every state");
    }
    detail::TableView v(spec, true);
    ConditionSummary s{Suite::simplified, {}};
    s.outcomes.push_back(detail::local_probability(v, Condition::LPC2, opt));
    s.outcomes.push_back(detail::column_orthogonality(v, Condition::OCV2, opt));
    s.outcomes.push_back(detail::row_norm_simplified(v, opt));
    auto [sa, sb] = detail::separability_one(v, Condition::SEP_a, Condition::SEP_b, opt);
    s.outcomes.push_back(std::move(sa));
    s.outcomes.push_back(std::move(sb));
    return s;
}

inline std::vector<ConditionReport> check_simplified(const QpaSpec &spec, const CheckOptions &opt = {}) {
    std::vector<ConditionReport> out;
    for (auto &o : check_simplified_summary(spec, opt).outcomes) {
        out.insert(out.end(), o.reports.begin(), o.reports.end());
    }
    return out;
}

/// General suite for general automata, simplified suite otherwise.
inline ConditionSummary check_all(const QpaSpec &spec, const CheckOptions &opt = {}) {
    return spec.kind() == Kind::general ? check_general(spec, opt) : check_simplified_summary(spec, opt);
}

}  // namespace qpa::wellformed
