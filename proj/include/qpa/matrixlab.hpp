#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpa/evolve.hpp"

// Finite truncations of the evolution operator.
//
// The configuration space of a run is countable; a window is a finite subset
// of it. A column is interior when its whole one-step image lies in the window,
// a row is interior when all of its one-step preimages do. Unitarity claims are
// only made on interior indices.

namespace qpa::matrixlab {

/// Sparse complex matrix stored by columns. Rows and columns are 0-based.
class TruncatedMatrix {
  public:
    using Column = std::vector<std::pair<size_t, Complex>>;

    TruncatedMatrix() = default;
    TruncatedMatrix(size_t rows, size_t cols) : rows_(rows), columns_(cols) {}
    explicit TruncatedMatrix(size_t dim) : TruncatedMatrix(dim, dim) {}

    size_t rows() const { return rows_; }
    size_t cols() const { return columns_.size(); }
    size_t dim() const { return std::max(rows_, cols()); }
    bool square() const { return rows_ == cols(); }

    /// Adds `v` to entry (r, c).
    void add(size_t r, size_t c, Complex v) {
        if (r >= rows_ || c >= cols()) {
            throw std::out_of_range("matrix entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                    ") outside " + std::to_string(rows_) + "x" + std::to_string(cols()));
        }
        auto &col = columns_[c];
        auto it = std::lower_bound(col.begin(), col.end(), r, [](const auto &e, size_t row) { return e.first < row; });
        if (it != col.end() && it->first == r) {
            it->second += v;
        } else {
            col.insert(it, {r, v});
        }
    }

    Complex at(size_t r, size_t c) const {
        const auto &col = columns_.at(c);
        auto it = std::lower_bound(col.begin(), col.end(), r, [](const auto &e, size_t row) { return e.first < row; });
        return it != col.end() && it->first == r ? it->second : Complex{};
    }

    const Column &column(size_t c) const { return columns_.at(c); }

    /// Row-major view: for each row, (column, value) pairs.
    std::vector<Column> row_view() const {
        std::vector<Column> out(rows_);
        for (size_t c = 0; c < cols(); ++c) {
            for (const auto &[r, v] : columns_[c]) {
                out[r].push_back({c, v});
            }
        }
        return out;
    }

    size_t nonzeros() const {
        size_t n = 0;
        for (const auto &c : columns_) {
            n += c.size();
        }
        return n;
    }

    TruncatedMatrix adjoint() const {
        TruncatedMatrix out(cols(), rows_);
        for (size_t c = 0; c < cols(); ++c) {
            for (const auto &[r, v] : columns_[c]) {
                out.columns_[r].push_back({c, std::conj(v)});
            }
        }
        return out;
    }

    TruncatedMatrix operator*(const TruncatedMatrix &b) const {
        if (cols() != b.rows()) {
            throw std::invalid_argument("dimension mismatch: " + std::to_string(rows_) + "x" + std::to_string(cols()) +
                                        " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
        }
        TruncatedMatrix out(rows_, b.cols());
        for (size_t j = 0; j < b.cols(); ++j) {
            std::map<size_t, Complex> acc;
            for (const auto &[k, bv] : b.columns_[j]) {
                for (const auto &[i, av] : columns_[k]) {
                    acc[i] += av * bv;
                }
            }
            out.columns_[j].assign(acc.begin(), acc.end());
        }
        return out;
    }

    struct Triplet {
        size_t row, col;
        Complex value;
    };

    /// Entries in column-major order.
    std::vector<Triplet> triplets() const {
        std::vector<Triplet> out;
        for (size_t c = 0; c < cols(); ++c) {
            for (const auto &[r, v] : columns_[c]) {
                out.push_back({r, c, v});
            }
        }
        return out;
    }

  private:
    size_t rows_ = 0;
    std::vector<Column> columns_;
};

/// Index sets of columns / rows whose support is complete in the truncation.
struct Interior {
    std::vector<bool> cols;
    std::vector<bool> rows;

    static Interior all(size_t rows, size_t cols) { return {std::vector<bool>(cols, true), std::vector<bool>(rows, true)}; }

    size_t count_cols() const { return static_cast<size_t>(std::count(cols.begin(), cols.end(), true)); }
    size_t count_rows() const { return static_cast<size_t>(std::count(rows.begin(), rows.end(), true)); }
};

struct WindowedMatrix {
    TruncatedMatrix matrix;
    Interior interior;
};

struct ConfigWindow {
    Tape tape;
    std::vector<Configuration> configs;  // sorted; position is the basis index
    Interior interior;

    std::optional<size_t> index_of(const Configuration &c) const {
        auto it = std::lower_bound(configs.begin(), configs.end(), c);
        if (it == configs.end() || *it != c) {
            return std::nullopt;
        }
        return static_cast<size_t>(it - configs.begin());
    }

    bool contains(const Configuration &c) const { return index_of(c).has_value(); }
    size_t size() const { return configs.size(); }
};

inline constexpr size_t kDefaultWindowCap = 1'000'000;

namespace detail {

struct Incoming {
    StateId from;
    SymbolId input;
    SymbolId top;
    Direction dir;
    StackWord push;
};

/// Entries grouped by target state.
inline std::vector<std::vector<Incoming>> incoming_by_target(const QpaSpec &spec) {
    std::vector<std::vector<Incoming>> out(spec.num_states());
    for (size_t t = 0; t < spec.num_triples(); ++t) {
        auto [q1, sigma, tau] = spec.triple_at(t);
        for (const auto &e : spec.column(t)) {
            out[e.to].push_back({q1, sigma, tau, e.dir, e.push});
        }
    }
    return out;
}

inline bool ends_with(const StackWord &s, const StackWord &w) {
    return w.size() <= s.size() && std::equal(w.begin(), w.end(), s.end() - static_cast<std::ptrdiff_t>(w.size()));
}

/// The configuration that `in` maps onto `c`, if one exists on this tape.
/// `edge` is set when the preimage would sit left of the tape.
inline std::optional<Configuration> preimage(const QpaSpec &spec, const Tape &tape, const Configuration &c,
                                             const Incoming &in, bool &edge) {
    const SymbolId base = spec.alphabets().base();
    if (!ends_with(c.stack, in.push)) {
        return std::nullopt;
    }
    StackWord prefix(c.stack.begin(), c.stack.end() - static_cast<std::ptrdiff_t>(in.push.size()));
    if (in.top == base ? !prefix.empty() : prefix.empty()) {
        return std::nullopt;
    }
    if (in.dir == Direction::advance && c.head == 0) {
        edge = true;
        return std::nullopt;
    }
    size_t head = in.dir == Direction::advance ? c.head - 1 : c.head;
    if (tape[head] != in.input) {
        return std::nullopt;
    }
    prefix.push_back(in.top);
    return Configuration{in.from, head, std::move(prefix)};
}

struct Successors {
    std::vector<std::pair<Configuration, Complex>> targets;
    bool off_tape = false;
};

inline Successors successors(const QpaSpec &spec, const Tape &tape, const Configuration &c) {
    Successors out;
    for (const auto &e : spec.column(c.state, tape[c.head], c.stack.back())) {
        if (e.dir == Direction::advance && c.head + 1 == tape.size()) {
            out.off_tape = true;
            continue;
        }
        out.targets.push_back({successor(c, e), e.amp});
    }
    return out;
}

}  // namespace detail

/// Configurations reachable from the initial one within `radius` steps
/// (measurement ignored), plus every one-step preimage of those.
inline ConfigWindow enumerate_window(const QpaSpec &spec, std::string_view word, size_t radius,
                                     size_t cap = kDefaultWindowCap) {
    Tape tape(spec.alphabets(), word);
    auto check_cap = [cap](size_t n) {
        if (n > cap) {
            throw WindowTooLarge("configuration window exceeds " + std::to_string(cap) + " entries");
        }
    };

    std::set<Configuration> reached;
    std::vector<Configuration> frontier{{spec.initial(), 0, {spec.alphabets().base()}}};
    reached.insert(frontier.front());
    for (size_t step = 0; step < radius && !frontier.empty(); ++step) {
        std::vector<Configuration> next;
        for (const auto &c : frontier) {
            for (auto &[t, a] : detail::successors(spec, tape, c).targets) {
                if (reached.insert(t).second) {
                    next.push_back(t);
                    check_cap(reached.size());
                }
            }
        }
        frontier = std::move(next);
    }

    auto incoming = detail::incoming_by_target(spec);
    std::set<Configuration> all(reached);
    for (const auto &c : reached) {
        for (const auto &in : incoming[c.state]) {
            bool edge = false;
            if (auto p = detail::preimage(spec, tape, c, in, edge)) {
                all.insert(std::move(*p));
                check_cap(all.size());
            }
        }
    }

    ConfigWindow w{tape, {all.begin(), all.end()}, {}};
    w.interior.cols.assign(w.size(), false);
    w.interior.rows.assign(w.size(), false);
    for (size_t i = 0; i < w.size(); ++i) {
        const auto &c = w.configs[i];
        auto succ = detail::successors(spec, tape, c);
        w.interior.cols[i] = !succ.off_tape && std::all_of(succ.targets.begin(), succ.targets.end(),
                                                           [&](const auto &t) { return w.contains(t.first); });
        bool complete = true;
        for (const auto &in : incoming[c.state]) {
            bool edge = false;
            auto p = detail::preimage(spec, tape, c, in, edge);
            if (edge || (p && !w.contains(*p))) {
                complete = false;
                break;
            }
        }
        w.interior.rows[i] = complete;
    }
    return w;
}

/// Entry (r, c) is the amplitude of configs[r] in the one-step image of configs[c].
inline TruncatedMatrix build_matrix(const QpaSpec &spec, const ConfigWindow &w) {
    TruncatedMatrix m(w.size());
    for (size_t c = 0; c < w.size(); ++c) {
        for (const auto &[t, a] : detail::successors(spec, w.tape, w.configs[c]).targets) {
            if (auto r = w.index_of(t)) {
                m.add(*r, c, a);
            }
        }
    }
    return m;
}

struct UnitarityReport {
    double column_deviation = 0;  // max |(U*U - I)_ij| over interior column pairs
    double row_deviation = 0;     // max | ||row_i||^2 - 1 | over interior rows
    size_t interior_cols = 0;
    size_t interior_rows = 0;
    std::optional<std::pair<size_t, size_t>> worst_column_pair;
    std::optional<size_t> worst_row;
    bool passed = false;
};

/// Orthonormality of interior columns and unit norm of interior rows.
inline UnitarityReport check_truncated_unitarity(const TruncatedMatrix &m, const Interior &interior,
                                                 double tol = 1e-9) {
    UnitarityReport rep;
    rep.interior_cols = interior.count_cols();
    rep.interior_rows = interior.count_rows();

    std::map<std::pair<size_t, size_t>, Complex> gram;
    for (size_t c = 0; c < m.cols(); ++c) {
        if (interior.cols[c]) {
            gram[{c, c}] = 0.0;
        }
    }
    for (const auto &row : m.row_view()) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (!interior.cols[row[i].first]) {
                continue;
            }
            for (size_t j = i; j < row.size(); ++j) {
                if (interior.cols[row[j].first]) {
                    gram[{row[i].first, row[j].first}] += std::conj(row[i].second) * row[j].second;
                }
            }
        }
    }
    for (const auto &[k, v] : gram) {
        double dev = std::abs(v - Complex(k.first == k.second ? 1.0 : 0.0, 0.0));
        if (dev > rep.column_deviation) {
            rep.column_deviation = dev;
            rep.worst_column_pair = k;
        }
    }

    auto rows = m.row_view();
    for (size_t r = 0; r < m.rows(); ++r) {
        if (!interior.rows[r]) {
            continue;
        }
        double n = 0;
        for (const auto &[c, v] : rows[r]) {
            n += std::norm(v);
        }
        double dev = std::abs(n - 1.0);
        if (!rep.worst_row || dev > rep.row_deviation) {
            rep.row_deviation = dev;
            rep.worst_row = r;
        }
    }
    rep.passed = rep.column_deviation <= tol && rep.row_deviation <= tol;
    return rep;
}

inline UnitarityReport check_truncated_unitarity(const TruncatedMatrix &m, const ConfigWindow &w,
                                                 double tol = 1e-9) {
    return check_truncated_unitarity(m, w.interior, tol);
}

/// The n x n truncation of the one-sided isometry whose first column is
/// (1/√2, 1/√2, 0, ...) and whose column j >= 1 is the basis vector e_{j+1}.
/// Columns 0..n-2 are complete; every row is complete.
inline WindowedMatrix shift_fixture(size_t n) {
    if (n < 3) {
        throw std::invalid_argument("shift fixture needs n >= 3");
    }
    TruncatedMatrix m(n);
    const double h = std::sqrt(0.5);
    m.add(0, 0, h);
    m.add(1, 0, h);
    for (size_t j = 1; j + 1 < n; ++j) {
        m.add(j + 1, j, 1.0);
    }
    Interior in = Interior::all(n, n);
    in.cols[n - 1] = false;
    return {std::move(m), std::move(in)};
}

/// Max |(A*A - I)_ij| over interior column pairs.
inline double column_orthonormality_deviation(const TruncatedMatrix &m, const Interior &interior) {
    Interior cols_only{interior.cols, std::vector<bool>(m.rows(), false)};
    return check_truncated_unitarity(m, cols_only).column_deviation;
}

/// Largest interior row norm. Refuses matrices whose interior columns are not
/// orthonormal within `tol`, since the bound only holds for those.
inline double row_norm_bound_probe(const TruncatedMatrix &m, const Interior &interior, double tol = 1e-9) {
    double dev = column_orthonormality_deviation(m, interior);
    if (dev > tol) {
        throw PreconditionFailed("interior columns are not orthonormal (deviation " + std::to_string(dev) + ")");
    }
    auto rows = m.row_view();
    double best = 0;
    for (size_t r = 0; r < m.rows(); ++r) {
        if (!interior.rows[r]) {
            continue;
        }
        double n = 0;
        for (const auto &[c, v] : rows[r]) {
            n += std::norm(v);
        }
        best = std::max(best, std::sqrt(n));
    }
    return best;
}

struct RowGram {
    double off_diagonal = 0;   // max |<row_i, row_j>| over distinct interior rows
    double norm_binary = 0;    // max distance of ||row_i||^2 from {0, 1}
    double max_norm = 0;       // max ||row_i||
};

/// Inner products between interior rows.
inline RowGram row_gram_probe(const TruncatedMatrix &m, const Interior &interior) {
    RowGram g;
    std::map<std::pair<size_t, size_t>, Complex> acc;
    std::vector<double> norms(m.rows(), 0.0);
    for (size_t c = 0; c < m.cols(); ++c) {
        const auto &col = m.column(c);
        for (size_t i = 0; i < col.size(); ++i) {
            if (!interior.rows[col[i].first]) {
                continue;
            }
            norms[col[i].first] += std::norm(col[i].second);
            for (size_t j = i + 1; j < col.size(); ++j) {
                if (interior.rows[col[j].first]) {
                    acc[{col[i].first, col[j].first}] += col[i].second * std::conj(col[j].second);
                }
            }
        }
    }
    for (const auto &[k, v] : acc) {
        g.off_diagonal = std::max(g.off_diagonal, std::abs(v));
    }
    for (size_t r = 0; r < m.rows(); ++r) {
        if (interior.rows[r]) {
            g.norm_binary = std::max(g.norm_binary, std::min(norms[r], std::abs(norms[r] - 1.0)));
            g.max_norm = std::max(g.max_norm, std::sqrt(norms[r]));
        }
    }
    return g;
}

/// Max |((AB)C - A(BC))_ij|.
inline double banded_associativity_probe(const TruncatedMatrix &a, const TruncatedMatrix &b,
                                         const TruncatedMatrix &c) {
    auto left = (a * b) * c;
    auto right = a * (b * c);
    double dev = 0;
    for (size_t j = 0; j < left.cols(); ++j) {
        std::map<size_t, Complex> diff;
        for (const auto &[i, v] : left.column(j)) {
            diff[i] += v;
        }
        for (const auto &[i, v] : right.column(j)) {
            diff[i] -= v;
        }
        for (const auto &[i, v] : diff) {
            dev = std::max(dev, std::abs(v));
        }
    }
    return dev;
}

/// Builds the window and its matrix in one call.
inline WindowedMatrix windowed_matrix(const QpaSpec &spec, const ConfigWindow &w) {
    return {build_matrix(spec, w), w.interior};
}

}  // namespace qpa::matrixlab
