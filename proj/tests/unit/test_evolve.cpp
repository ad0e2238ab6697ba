#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "qpa/qpa.hpp"

using namespace qpa;

namespace {

const std::string Z{kStackBase};

Configuration config(const QpaSpec &spec, std::string_view state, size_t head, std::string_view stack) {
    return {spec.state_id(state), head, spec.alphabets().parse_stack_word(stack)};
}

double total(const StepSnapshot &s) { return s.p_accept_total + s.p_reject_total + s.residual_norm; }

/// One stay state with an identity table: well-formed and never halts.
QpaSpec idle_spec() {
    SpecBuilder b(Kind::simplified);
    b.input_alphabet({"a"}).stack_alphabet({}).states({"q"}).initial("q").direction("q", Direction::stay);
    for (const char *s : {"#", "a", "$"}) {
        b.phi("q", s, Z, "q", {Z});
    }
    return b.build();
}

/// Keeps only half the weight each step: violates local probability.
QpaSpec leaky_spec() {
    SpecBuilder b(Kind::simplified);
    b.input_alphabet({"a"}).stack_alphabet({}).states({"q"}).initial("q").direction("q", Direction::stay);
    for (const char *s : {"#", "a", "$"}) {
        b.phi("q", s, Z, "q", {Z}, "sqrt(1/2)");
    }
    return b.build();
}

/// Number of letters that shrink the a/b imbalance.
size_t pops(std::string_view w) {
    long diff = 0;
    size_t n = 0;
    for (char c : w) {
        long next = diff + (c == 'a' ? 1 : -1);
        n += std::labs(next) < std::labs(diff);
        diff = next;
    }
    return n;
}

Superposition random_superposition(gen::Rng &rng, const std::vector<Configuration> &support) {
    Superposition psi;
    for (const auto &c : support) {
        psi.set(c, gen::random_complex(rng));
    }
    return psi.scaled(1.0 / std::sqrt(psi.norm_squared()));
}

}  // namespace

TEST(Tape, FramesTheWord) {
    const auto &spec = zoo::l2_rpa().spec;
    Tape t(spec.alphabets(), "ab");
    ASSERT_EQ(t.size(), 4u);
    EXPECT_EQ(t.word_length(), 2u);
    EXPECT_EQ(t[0], spec.alphabets().left_marker());
    EXPECT_EQ(t[3], spec.alphabets().right_marker());
    EXPECT_EQ(Tape(spec.alphabets(), "").size(), 2u);
    EXPECT_THROW(Tape(spec.alphabets(), "aXb"), UnknownSymbol);
    EXPECT_THROW(Tape(spec.alphabets(), std::vector<SymbolId>{spec.alphabets().left_marker()}), UnknownSymbol);
}

TEST(InitialSuperposition, SingleBaseConfiguration) {
    const auto &spec = zoo::l1_rpa().spec;
    for (const char *w : {"1", ""}) {
        auto psi = initial_superposition(spec, w);
        ASSERT_EQ(psi.size(), 1u);
        EXPECT_EQ(psi.amplitude(config(spec, "q0", 0, "Z0")), Complex(1.0, 0.0));
    }
    EXPECT_THROW(initial_superposition(spec, "12"), UnknownSymbol);
}

TEST(ApplyEvolution, CounterPushesOnA) {
    const auto &spec = zoo::l2_rpa().spec;
    Tape tape(spec.alphabets(), "ab");
    Superposition psi;
    psi.set(config(spec, "q0", 1, "Z0"), 1.0);
    auto next = apply_evolution(spec, tape, psi);
    ASSERT_EQ(next.size(), 1u);
    EXPECT_EQ(next.amplitude(config(spec, "q0", 2, "Z0 1")), Complex(1.0, 0.0));
}

TEST(ApplyEvolution, EmptyStaysEmpty) {
    const auto &spec = zoo::l2_rpa().spec;
    EXPECT_TRUE(apply_evolution(spec, Tape(spec.alphabets(), "ab"), Superposition{}).empty());
}

TEST(ApplyEvolution, ThreeWaySplitOnLeftMarker) {
    const auto &spec = zoo::l5_qpa().spec;
    Tape tape(spec.alphabets(), "abc");
    auto next = apply_evolution(spec, tape, initial_superposition(spec, tape));
    ASSERT_EQ(next.size(), 3u);
    EXPECT_NEAR(next.amplitude(config(spec, "A0", 1, "Z0")).real(), std::sqrt(2.0 / 7.0), 1e-15);
    EXPECT_NEAR(next.amplitude(config(spec, "C0", 1, "Z0")).real(), -std::sqrt(2.0 / 7.0), 1e-15);
    EXPECT_NEAR(next.amplitude(config(spec, "U", 0, "Z0")).real(), std::sqrt(3.0 / 7.0), 1e-15);
    EXPECT_NEAR(next.norm_squared(), 1.0, 1e-15);
}

TEST(ApplyEvolution, AdvancingPastTheEndIsAnError) {
    auto spec = zoo::nonunitary_example();
    Tape tape(spec.alphabets(), "1");
    Superposition psi;
    psi.set(config(spec, "q", 2, "Z0"), 1.0);
    EXPECT_THROW(apply_evolution(spec, tape, psi), TapeOverrun);
    // below the pruning threshold the branch is dropped instead
    psi.set(config(spec, "q", 2, "Z0"), 1e-16);
    EXPECT_TRUE(apply_evolution(spec, tape, psi).empty());
}

TEST(ApplyEvolution, IsLinear) {
    gen::Rng rng(3);
    for (const auto &n : zoo::names()) {
        const auto &spec = zoo::get(n).spec;
        for (int i = 0; i < 10; ++i) {
            std::string word = gen::random_word(rng, n == "l1" ? "01" : n == "l2" ? "ab" : "abc", 5);
            auto w = matrixlab::enumerate_window(spec, word, 4);
            std::vector<Configuration> inner;
            for (const auto &c : w.configs) {
                if (c.head + 1 < w.tape.size()) {
                    inner.push_back(c);
                }
            }
            std::shuffle(inner.begin(), inner.end(), rng);
            size_t half = inner.size() / 2;
            auto p1 = random_superposition(rng, {inner.begin(), inner.begin() + static_cast<long>(half)});
            auto p2 = random_superposition(rng, {inner.begin() + static_cast<long>(half), inner.end()});
            Complex a = gen::random_complex(rng), b = gen::random_complex(rng);
            auto lhs = apply_evolution(spec, w.tape, p1.scaled(a) + p2.scaled(b), 0.0);
            auto rhs = apply_evolution(spec, w.tape, p1, 0.0).scaled(a) + apply_evolution(spec, w.tape, p2, 0.0).scaled(b);
            for (const auto &[c, v] : lhs) {
                EXPECT_NEAR(std::abs(v - rhs.amplitude(c)), 0.0, 1e-12);
            }
            for (const auto &[c, v] : rhs) {
                EXPECT_NEAR(std::abs(v - lhs.amplitude(c)), 0.0, 1e-12);
            }
        }
    }
}

TEST(ApplyEvolution, PreservesNormOfOnTapeStates) {
    gen::Rng rng(4);
    for (const auto &n : zoo::names()) {
        const auto &spec = zoo::get(n).spec;
        for (int i = 0; i < 10; ++i) {
            std::string word = gen::random_word(rng, n == "l1" ? "01" : n == "l2" ? "ab" : "abc", 6);
            auto w = matrixlab::enumerate_window(spec, word, 5);
            std::vector<Configuration> inner;
            for (const auto &c : w.configs) {
                if (c.head + 1 < w.tape.size()) {
                    inner.push_back(c);
                }
            }
            auto psi = random_superposition(rng, inner);
            EXPECT_NEAR(apply_evolution(spec, w.tape, psi, 0.0).norm_squared(), 1.0, 1e-9) << n << " " << word;
        }
    }
}

TEST(ApplyEvolution, AgreesWithTruncatedMatrixPowers) {
    for (const auto &n : zoo::names()) {
        const auto &spec = zoo::get(n).spec;
        std::string alphabet = n == "l1" ? "01" : n == "l2" ? "ab" : "abc";
        for (const auto &word : gen::all_words(alphabet, 4)) {
            const size_t radius = word.size() + 3;
            auto w = matrixlab::enumerate_window(spec, word, radius);
            Eigen::MatrixXcd m = oracle::to_dense(matrixlab::build_matrix(spec, w));
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(w.size()));
            auto psi = initial_superposition(spec, w.tape);
            v(static_cast<Eigen::Index>(*w.index_of(psi.begin()->first))) = 1.0;
            for (size_t k = 0; k < radius; ++k) {
                // Unmeasured, halting branches keep moving and may leave the tape.
                try {
                    psi = apply_evolution(spec, w.tape, psi, 0.0);
                } catch (const TapeOverrun &) {
                    break;
                }
                v = m * v;
                double dev = 0;
                for (size_t i = 0; i < w.size(); ++i) {
                    dev = std::max(dev, std::abs(v(static_cast<Eigen::Index>(i)) - psi.amplitude(w.configs[i])));
                }
                for (const auto &[c, a] : psi) {
                    ASSERT_TRUE(w.contains(c)) << n << " " << word;
                }
                ASSERT_LE(dev, 1e-12) << n << " word '" << word << "' step " << k + 1;
            }
        }
    }
}

TEST(Measure, Projections) {
    const auto &spec = zoo::l2_rpa().spec;
    Superposition acc;
    acc.set(config(spec, "q2", 3, "Z0"), 1.0);
    auto m = measure(spec, acc);
    EXPECT_EQ(m.p_accept, 1.0);
    EXPECT_EQ(m.p_reject, 0.0);
    EXPECT_TRUE(m.residual.empty());

    Superposition live;
    live.set(config(spec, "q0", 1, "Z0"), std::sqrt(0.5));
    live.set(config(spec, "q1", 1, "Z0"), Complex(0, std::sqrt(0.5)));
    auto n = measure(spec, live);
    EXPECT_EQ(n.p_accept, 0.0);
    EXPECT_EQ(n.p_reject, 0.0);
    EXPECT_EQ(n.residual.size(), 2u);
    EXPECT_EQ(n.residual.amplitude(config(spec, "q1", 1, "Z0")), live.amplitude(config(spec, "q1", 1, "Z0")));

    Superposition mixed = live.scaled(std::sqrt(0.5));
    mixed.set(config(spec, "q3", 2, "Z0 1"), 0.5);
    auto k = measure(spec, mixed);
    EXPECT_NEAR(k.p_reject, 0.25, 1e-15);
    EXPECT_NEAR(k.residual.norm_squared(), 0.5, 1e-15);  // not renormalized
}

TEST(Measure, ThirdBranchRejectsAtOnce) {
    Recognizer r(zoo::l3_qpa().spec);
    auto t = r.trace("abc");
    ASSERT_FALSE(t.empty());
    EXPECT_NEAR(t[0].p_reject_inc, 1.0 / 3.0, 1e-12);
    EXPECT_EQ(t[0].p_accept_inc, 0.0);
}

TEST(Recognize, RpaExamples) {
    auto l1 = recognize(zoo::l1_rpa().spec, "1");
    EXPECT_NEAR(l1.p_accept, 1.0, 1e-9);
    EXPECT_TRUE(l1.halted);
    EXPECT_EQ(l1.steps, 3u);

    Recognizer l2(zoo::l2_rpa().spec);
    for (const char *w : {"ab", "ba", "aabb", ""}) {
        EXPECT_NEAR(l2.run(w).p_accept, 1.0, 1e-9) << w;
    }
    for (const char *w : {"aab", "a"}) {
        EXPECT_NEAR(l2.run(w).p_reject, 1.0, 1e-9) << w;
    }
}

TEST(Recognize, CounterStepCount) {
    Recognizer l2(zoo::l2_rpa().spec);
    for (const auto &w : gen::all_words("ab", 8)) {
        auto r = l2.run(w);
        ASSERT_TRUE(r.halted);
        EXPECT_EQ(r.steps, w.size() + pops(w) + 2) << w;
    }
    Recognizer l1(zoo::l1_rpa().spec);
    for (const auto &w : gen::all_words("01", 8)) {
        EXPECT_EQ(l1.run(w).steps, w.size() + 2) << w;
    }
}

TEST(Recognize, ThreeWaySplit) {
    auto r = recognize(zoo::l3_qpa().spec, "abc");
    EXPECT_NEAR(r.p_accept, 2.0 / 3.0, 1e-9);
    EXPECT_NEAR(r.p_reject, 1.0 / 3.0, 1e-9);
    EXPECT_TRUE(r.halted);
}

TEST(Recognize, RefusesIllFormedUnlessForced) {
    EXPECT_THROW(Recognizer(zoo::nonunitary_example()), NotWellFormed);
    EXPECT_THROW(recognize(zoo::l2_as_printed(), "ab"), NotWellFormed);
    EXPECT_NO_THROW(Recognizer(zoo::nonunitary_example(), true));
    SpecBuilder bad(Kind::general);
    bad.input_alphabet({"a"}).states({"q"}).initial("q").transition("q", "a", Z, "q", Direction::stay, {});
    EXPECT_THROW(Recognizer(bad.build(), true), StructureError);
}

TEST(Recognize, StopsAtMaxSteps) {
    Recognizer r(idle_spec());
    auto res = r.run("aa");
    EXPECT_FALSE(res.halted);
    EXPECT_EQ(res.steps, default_max_steps(2));
    EXPECT_EQ(res.steps, 80u);
    EXPECT_NEAR(res.p_nonhalt, 1.0, 1e-12);
    RunOptions opt;
    opt.max_steps = 7;
    EXPECT_EQ(r.run("a", opt).steps, 7u);
}

TEST(Trace, ConservationOnL1) {
    Recognizer r(zoo::l1_rpa().spec);
    RunOptions opt;
    opt.max_steps = 6;
    auto t = r.trace("1", opt);
    ASSERT_EQ(t.size(), 3u);  // halts before the bound
    for (const auto &s : t) {
        EXPECT_NEAR(total(s), 1.0, 1e-12);
        EXPECT_NEAR(s.state.norm_squared(), s.p_accept_inc + s.p_reject_inc + s.residual_norm, 1e-12);
    }
    EXPECT_NEAR(t.back().p_accept_total, 1.0, 1e-12);
}

TEST(Trace, EmptyWordOnCounterAccepts) {
    auto t = Recognizer(zoo::l2_rpa().spec).trace("");
    ASSERT_FALSE(t.empty());
    EXPECT_NEAR(t.back().p_accept_total, 1.0, 1e-12);
    EXPECT_LT(t.back().residual_norm, kHaltEps);
}

TEST(Trace, ForcedNonunitaryRunsOffTheTape) {
    // Columns are orthonormal, so the norm is kept until the head leaves the tape.
    Recognizer r(zoo::nonunitary_example(), true);
    RunOptions opt;
    opt.max_steps = 2;
    auto t = r.trace("1", opt);
    ASSERT_EQ(t.size(), 2u);
    for (const auto &s : t) {
        EXPECT_NEAR(s.residual_norm, 1.0, 1e-12);
    }
    opt.max_steps = 3;
    EXPECT_THROW(r.trace("1", opt), TapeOverrun);
}

TEST(Trace, ForcedLeakyTableDrifts) {
    Recognizer r(leaky_spec(), true);
    RunOptions opt;
    opt.max_steps = 4;
    auto t = r.trace("a", opt);
    ASSERT_EQ(t.size(), 4u);
    for (size_t k = 0; k < t.size(); ++k) {
        EXPECT_NEAR(total(t[k]), std::pow(0.5, static_cast<double>(k + 1)), 1e-15);
    }
}

TEST(Trace, ConfigurationsKeepTheStackBase) {
    gen::Rng rng(12);
    for (const auto &n : zoo::names()) {
        Recognizer r(zoo::get(n).spec);
        SymbolId base = r.spec().alphabets().base();
        for (int i = 0; i < 20; ++i) {
            auto word = gen::random_word(rng, n == "l1" ? "01" : n == "l2" ? "ab" : "abc", 8);
            for (const auto &s : r.trace(word)) {
                for (const auto &[c, a] : s.state) {
                    ASSERT_FALSE(c.stack.empty());
                    EXPECT_EQ(c.stack.front(), base);
                    EXPECT_EQ(std::count(c.stack.begin(), c.stack.end(), base), 1);
                    EXPECT_LT(c.head, word.size() + 2);
                }
            }
        }
    }
}

TEST(Trace, OppositeAmplitudesCancel) {
    Recognizer r(zoo::l5_qpa().spec);
    RunOptions opt;
    opt.prune_eps = 0.0;
    for (const char *w : {"", "abc", "cab", "aabbcc"}) {
        auto t = r.trace(w, opt);
        Configuration meet = config(r.spec(), "A2", std::string_view(w).size() + 1, "Z0");
        bool seen = false;
        for (const auto &s : t) {
            for (const auto &[c, a] : s.state) {
                if (c == meet) {
                    seen = true;
                    EXPECT_LT(std::abs(a), 1e-12) << w;
                }
            }
        }
        EXPECT_TRUE(seen) << w;
        EXPECT_NEAR(t.back().p_accept_total, 3.0 / 7.0, 1e-9) << w;
    }
}

TEST(Trace, SnapshotsAreSorted) {
    auto t = Recognizer(zoo::l3_qpa().spec).trace("abcabc");
    for (const auto &s : t) {
        const Configuration *prev = nullptr;
        for (const auto &[c, a] : s.state) {
            if (prev) {
                EXPECT_LT(*prev, c);
            }
            prev = &c;
        }
    }
}

TEST(Decide, Thresholds) {
    RecognitionResult one{1.0, 0.0, 0.0, 3, true};
    EXPECT_EQ(decide(one, 0.99), Verdict::accepted);
    RecognitionResult two_thirds{2.0 / 3.0, 1.0 / 3.0, 0.0, 6, true};
    EXPECT_EQ(decide(two_thirds, 0.6), Verdict::accepted);
    EXPECT_EQ(decide(two_thirds, 0.7), Verdict::inconclusive);
    RecognitionResult three_sevenths{3.0 / 7.0, 0.0, 4.0 / 7.0, 10, false};
    EXPECT_EQ(decide(three_sevenths, 0.55), Verdict::inconclusive);
    RecognitionResult rejected{0.0, 1.0 - 1e-13, 0.0, 4, true};
    EXPECT_EQ(decide(rejected, 1.0), Verdict::rejected);
}

TEST(Decide, DefaultIsStrictMajority) {
    EXPECT_EQ(decide({0.5, 0.5, 0, 1, true}), Verdict::inconclusive);
    EXPECT_EQ(decide({4.0 / 7.0, 3.0 / 7.0, 0, 1, true}), Verdict::accepted);
    EXPECT_EQ(decide({3.0 / 7.0, 4.0 / 7.0, 0, 1, true}), Verdict::rejected);
}

TEST(Decide, RejectsThresholdsOutsideRange) {
    RecognitionResult r{1, 0, 0, 1, true};
    EXPECT_THROW(decide(r, 0.5), std::invalid_argument);
    EXPECT_THROW(decide(r, 1.01), std::invalid_argument);
    EXPECT_THROW(decide(r, std::nan("")), std::invalid_argument);
}

TEST(Decide, FiveSevenAutomatonOnBothEqual) {
    auto r = recognize(zoo::l5_qpa().spec, "abc");
    EXPECT_NEAR(r.p_accept, 3.0 / 7.0, 1e-9);
    EXPECT_NEAR(r.p_reject, 4.0 / 7.0, 1e-9);
    EXPECT_EQ(decide(r, 0.55), Verdict::rejected);
    EXPECT_EQ(decide(r), Verdict::rejected);
}
