#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qpa/model.hpp"
#include "qpa/zoo.hpp"

using namespace qpa;

namespace {

const std::string Z{kStackBase};

bool has_rule(const std::vector<StructureViolation> &v, StructureRule r) {
    return std::any_of(v.begin(), v.end(), [r](const auto &x) { return x.rule == r; });
}

SpecBuilder one_state(Kind kind = Kind::general) {
    SpecBuilder b(kind);
    b.input_alphabet({"a"}).stack_alphabet({"1", "2"}).states({"q"}).initial("q");
    return b;
}

std::vector<std::string> names(const Alphabets &alpha, const std::vector<StackWord> &words) {
    std::vector<std::string> out;
    for (const auto &w : words) {
        out.push_back(w.empty() ? "eps" : alpha.format_stack_word(w));
    }
    return out;
}

}  // namespace

TEST(Alphabets, ReservedSymbolsAreInjected) {
    Alphabets alpha({"b", "a"}, {"x"});
    EXPECT_EQ(alpha.input_names(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(alpha.tape_size(), 4u);
    EXPECT_EQ(alpha.stack_size(), 2u);
    EXPECT_EQ(alpha.tape_name(alpha.left_marker()), "#");
    EXPECT_EQ(alpha.tape_name(alpha.right_marker()), "$");
    EXPECT_EQ(alpha.stack_name(alpha.base()), "Z0");
    EXPECT_FALSE(alpha.is_input(alpha.left_marker()));
    EXPECT_TRUE(alpha.is_input(alpha.tape_id("a")));
}

TEST(Alphabets, ReservedNamesCannotBeDeclared) {
    EXPECT_THROW(Alphabets({"#"}, {}), ParseError);
    EXPECT_THROW(Alphabets({"a"}, {"Z0"}), ParseError);
    EXPECT_THROW(Alphabets({"a", "a"}, {}), ParseError);
    EXPECT_THROW(Alphabets({"a b"}, {}), ParseError);
}

TEST(Alphabets, WordTokenization) {
    Alphabets alpha({"a", "b"}, {"1"});
    EXPECT_EQ(alpha.parse_word("abba").size(), 4u);
    EXPECT_TRUE(alpha.parse_word("").empty());
    EXPECT_THROW(alpha.parse_word("aXb"), UnknownSymbol);
    EXPECT_THROW(alpha.parse_word("a#"), UnknownSymbol);

    Alphabets multi({"x", "xx"}, {});
    EXPECT_THROW(multi.parse_word("xxx"), ParseError);  // x·xx or xx·x
    EXPECT_EQ(multi.parse_word("x xx").size(), 2u);

    Alphabets named({"ab", "c"}, {"10", "2"});
    EXPECT_EQ(named.parse_word("abcab").size(), 3u);
    EXPECT_EQ(named.format_stack_word(named.parse_stack_word("Z0 10 2")), "Z0102");
}

TEST(SpecBuilder, SortsStatesAndResolvesNames) {
    auto spec = zoo::l1_rpa().spec;
    EXPECT_EQ(spec.num_states(), 6u);
    EXPECT_TRUE(std::is_sorted(spec.state_names().begin(), spec.state_names().end()));
    EXPECT_EQ(spec.state_name(spec.initial()), "q0");
    EXPECT_EQ(spec.accepting(), std::vector<StateId>{spec.state_id("q5")});
    EXPECT_EQ(spec.rejecting(), std::vector<StateId>{spec.state_id("q4")});
    EXPECT_THROW(spec.state_id("q6"), UnknownSymbol);
}

TEST(SpecBuilder, RejectsBadDeclarations) {
    EXPECT_THROW(SpecBuilder(Kind::general).build(), ParseError);
    EXPECT_THROW(one_state().initial("p").build(), UnknownSymbol);
    EXPECT_THROW(one_state().accepting({"p"}).build(), UnknownSymbol);
    EXPECT_THROW(one_state().states({"q", "q"}).build(), ParseError);
    EXPECT_THROW(one_state().transition("q", "c", Z, "q", Direction::stay, {Z}).build(), UnknownSymbol);
    EXPECT_THROW(one_state().transition("q", "a", "3", "q", Direction::stay, {}).build(), UnknownSymbol);
    EXPECT_THROW(one_state()
                     .transition("q", "a", Z, "q", Direction::stay, {Z}, "1/2")
                     .transition("q", "a", Z, "q", Direction::stay, {Z}, "1/3")
                     .build(),
                 ParseError);
    EXPECT_THROW(one_state(Kind::simplified).phi("q", "a", Z, "q", {Z}), StructureError);
}

TEST(SpecBuilder, ZeroAmplitudesAreStoredButNotInColumns) {
    auto spec = one_state().transition("q", "a", Z, "q", Direction::stay, {Z}, "0").build();
    EXPECT_EQ(spec.transitions().size(), 1u);
    auto &a = spec.alphabets();
    EXPECT_TRUE(spec.column(spec.state_id("q"), a.tape_id("a"), a.base()).empty());
}

TEST(ValidateStructure, ZooSpecsAreClean) {
    for (const auto &name : zoo::names()) {
        EXPECT_TRUE(validate_structure(zoo::get(name).spec).empty()) << name;
    }
    for (const auto &f : zoo::fixtures()) {
        EXPECT_TRUE(validate_structure(f.make()).empty()) << f.name;
    }
}

TEST(ValidateStructure, PoppingTheBase) {
    auto spec = one_state().transition("q", "a", Z, "q", Direction::advance, {}).build();
    auto v = validate_structure(spec);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rule, StructureRule::base_removed);
    EXPECT_EQ(to_string(v[0].rule), "Z0 pop removes base");
    EXPECT_NE(v[0].subject.find("delta(q, a, Z0, q, advance, eps)"), std::string::npos);
}

TEST(ValidateStructure, PushPrefixMustBeThePoppedSymbol) {
    auto spec = one_state().transition("q", "a", "2", "q", Direction::stay, {"1", "2"}).build();
    auto v = validate_structure(spec);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rule, StructureRule::push_prefix_mismatch);
    EXPECT_EQ(to_string(v[0].rule), "ω₁ ≠ β");
}

TEST(ValidateStructure, OtherRestrictions) {
    auto check = [](SpecBuilder b, StructureRule r) {
        EXPECT_TRUE(has_rule(validate_structure(b.build()), r)) << to_string(r);
    };
    check(one_state().transition("q", "a", "1", "q", Direction::stay, {"1", "1", "1"}), StructureRule::push_too_long);
    check(one_state().transition("q", "a", Z, "q", Direction::stay, {"1"}), StructureRule::base_removed);
    check(one_state().transition("q", "a", Z, "q", Direction::stay, {Z, Z}), StructureRule::base_pushed);
    check(one_state().transition("q", "a", "1", "q", Direction::stay, {Z}), StructureRule::base_pushed);
    check(one_state().transition("q", "a", Z, "q", Direction::stay, {Z}, "(1,1)"), StructureRule::amplitude_modulus);
    check(one_state().accepting({"q"}).rejecting({"q"}), StructureRule::halting_overlap);
    check(one_state(Kind::simplified), StructureRule::direction_missing);
    check(one_state(Kind::simplified)
              .direction("q", Direction::stay)
              .transition("q", "a", Z, "q", Direction::advance, {Z}),
          StructureRule::direction_mismatch);
    check(one_state(Kind::reversible)
              .direction("q", Direction::stay)
              .transition("q", "a", Z, "q", Direction::stay, {Z}, "-1"),
          StructureRule::reversible_amplitude);
    check(one_state(Kind::reversible)
              .direction("q", Direction::stay)
              .transition("q", "a", Z, "q", Direction::stay, {Z})
              .transition("q", "a", Z, "q", Direction::stay, {Z, "1"}),
          StructureRule::reversible_not_function);
}

TEST(ValidateStructure, ModulusOneIsAllowed) {
    auto spec = one_state().transition("q", "a", Z, "q", Direction::stay, {Z}, "(sqrt(1/2),sqrt(1/2))").build();
    EXPECT_TRUE(validate_structure(spec).empty());
    EXPECT_NO_THROW(require_valid_structure(spec));
    auto bad = one_state().transition("q", "a", Z, "q", Direction::stay, {}).build();
    EXPECT_THROW(require_valid_structure(bad), StructureError);
}

TEST(EnumeratePushWords, Examples) {
    Alphabets one({"a"}, {"1"});
    EXPECT_EQ(names(one, enumerate_push_words("Z0", one)), (std::vector<std::string>{"Z0", "Z01"}));

    Alphabets two({"a"}, {"1", "2"});
    EXPECT_EQ(names(two, enumerate_push_words("1", two)), (std::vector<std::string>{"eps", "1", "2", "11", "12"}));

    Alphabets none({"a"}, {});
    EXPECT_EQ(names(none, enumerate_push_words("Z0", none)), (std::vector<std::string>{"Z0"}));
    EXPECT_THROW(enumerate_push_words("3", two), UnknownSymbol);
    EXPECT_THROW(enumerate_push_words(SymbolId{7}, two), UnknownSymbol);
}

TEST(EnumeratePushWords, EveryStoredPushIsEnumerated) {
    std::vector<QpaSpec> specs;
    for (const auto &name : zoo::names()) {
        specs.push_back(zoo::get(name).spec);
    }
    for (const auto &f : zoo::fixtures()) {
        specs.push_back(f.make());
    }
    for (const auto &spec : specs) {
        for (const auto &t : spec.transitions()) {
            auto words = enumerate_push_words(t.stack_top, spec.alphabets());
            EXPECT_NE(std::find(words.begin(), words.end(), t.push), words.end()) << spec.describe(t);
        }
    }
}

TEST(EnumeratePushWords, MatchesTheRestrictionsOnAllShortWords) {
    Alphabets alpha({"a"}, {"1", "2"});
    const SymbolId base = alpha.base();
    for (SymbolId tau = 0; tau < alpha.stack_size(); ++tau) {
        auto listed = enumerate_push_words(tau, alpha);
        std::vector<StackWord> all{{}};
        for (SymbolId x = 0; x < alpha.stack_size(); ++x) {
            all.push_back({x});
            for (SymbolId y = 0; y < alpha.stack_size(); ++y) {
                all.push_back({x, y});
            }
        }
        for (const auto &w : all) {
            bool legal = true;
            if (w.size() == 2 && w[0] != tau) {
                legal = false;
            }
            if (tau == base) {
                legal = legal && !w.empty() && w[0] == base && std::count(w.begin(), w.end(), base) == 1;
            } else {
                legal = legal && std::count(w.begin(), w.end(), base) == 0;
            }
            bool found = std::find(listed.begin(), listed.end(), w) != listed.end();
            EXPECT_EQ(found, legal);
        }
    }
}

TEST(TransitionsFrom, L1ForwardStep) {
    auto col = transitions_from(zoo::l1_rpa().spec, "q0", "0", "Z0");
    const auto &spec = zoo::l1_rpa().spec;
    ASSERT_EQ(col.size(), 1u);
    EXPECT_EQ(spec.state_name(col[0].to), "q0");
    EXPECT_EQ(col[0].dir, Direction::advance);
    EXPECT_EQ(spec.alphabets().format_stack_word(col[0].push), "Z00");
    EXPECT_EQ(col[0].amp, Complex(1.0, 0.0));
}

TEST(TransitionsFrom, EmptyAndUnknown) {
    auto spec = one_state().build();
    EXPECT_TRUE(transitions_from(spec, "q", "a", "1").empty());
    EXPECT_THROW(transitions_from(spec, "p", "a", "1"), UnknownSymbol);
    EXPECT_THROW(transitions_from(spec, "q", "b", "1"), UnknownSymbol);
}

TEST(TransitionsFrom, L5InitialSplit) {
    auto col = transitions_from(zoo::l5_qpa().spec, "S", "#", "Z0");
    ASSERT_EQ(col.size(), 3u);
    std::vector<double> amps;
    for (const auto &e : col) {
        EXPECT_EQ(e.amp.imag(), 0.0);
        amps.push_back(e.amp.real());
    }
    std::sort(amps.begin(), amps.end());
    EXPECT_NEAR(amps[0], -std::sqrt(2.0 / 7.0), 1e-15);
    EXPECT_NEAR(amps[1], std::sqrt(2.0 / 7.0), 1e-15);
    EXPECT_NEAR(amps[2], std::sqrt(3.0 / 7.0), 1e-15);
}

TEST(WithKind, ReinterpretsTheSameTable) {
    const auto &l2 = zoo::l2_rpa().spec;
    auto g = with_kind(l2, Kind::general);
    EXPECT_EQ(g.kind(), Kind::general);
    ASSERT_EQ(g.transitions().size(), l2.transitions().size());
    for (size_t i = 0; i < g.transitions().size(); ++i) {
        EXPECT_EQ(g.transitions()[i].key(), l2.transitions()[i].key());
    }
    EXPECT_EQ(g.direction(g.state_id("q0")), Direction::advance);
}
