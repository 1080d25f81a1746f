#include <sa/ordering.hpp>
#include <sa/subsumption.hpp>
#include <sa/unify.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace sa;

namespace
{
    struct Sig
    {
        SymbolTable symbols;
        SymbolId p = symbols.predicate("p", 1);
        SymbolId p2 = symbols.predicate("p2", 2);
        SymbolId q = symbols.predicate("q", 1);
        SymbolId r = symbols.predicate("r", 1);
        SymbolId s = symbols.predicate("s", 1);
        SymbolId at1 = symbols.answer_predicate(1);
        SymbolId f = symbols.function("f", 1);
        SymbolId g = symbols.function("g", 1);
        SymbolId h = symbols.function("h", 2);
        SymbolId a = symbols.constant("a");
        SymbolId b = symbols.constant("b");
        SymbolId c = symbols.constant("c");

        Term A() const { return Term::app(a); }
        Term B() const { return Term::app(b); }
        Term C() const { return Term::app(c); }
        Term F(Term t) const { return Term::app(f, {std::move(t)}); }
        Term G(Term t) const { return Term::app(g, {std::move(t)}); }
        Term H(Term x, Term y) const { return Term::app(h, {std::move(x), std::move(y)}); }
    };

    Term V(VarId v) { return Term::var(v); }

    // Textbook Robinson unification over an explicit equation list, written
    // independently of the library so it can serve as a reference.
    std::optional<std::map<VarId, Term>> robinson(std::vector<std::pair<Term, Term>> eqs)
    {
        std::map<VarId, Term> sol;
        auto subst = [](const Term &t, VarId v, const Term &by, auto &self) -> Term
        {
            if (t.is_var())
                return t.var_id() == v ? by : t;
            std::vector<Term> args;
            for (const Term &x : t.args())
                args.push_back(self(x, v, by, self));
            return Term::app(t.functor(), args);
        };
        while (!eqs.empty())
        {
            auto [s, t] = eqs.back();
            eqs.pop_back();
            if (s == t)
                continue;
            if (!s.is_var() && t.is_var())
                std::swap(s, t);
            if (s.is_var())
            {
                if (t.contains_var(s.var_id()))
                    return std::nullopt;
                VarId v = s.var_id();
                for (auto &[l, r] : eqs)
                {
                    l = subst(l, v, t, subst);
                    r = subst(r, v, t, subst);
                }
                for (auto &[w, u] : sol)
                    u = subst(u, v, t, subst);
                sol[v] = t;
                continue;
            }
            if (s.functor() != t.functor() || s.args().size() != t.args().size())
                return std::nullopt;
            for (std::size_t i = 0; i < s.args().size(); ++i)
                eqs.emplace_back(s.args()[i], t.args()[i]);
        }
        return sol;
    }

    Term random_term(std::mt19937_64 &rng, const Sig &sig, int depth, int n_vars)
    {
        int roll = std::uniform_int_distribution<int>(0, 9)(rng);
        if (depth == 0 || roll < 4)
            return V(static_cast<VarId>(std::uniform_int_distribution<int>(0, n_vars - 1)(rng)));
        if (roll < 6)
            return roll == 4 ? sig.A() : sig.B();
        if (roll < 8)
            return sig.F(random_term(rng, sig, depth - 1, n_vars));
        return sig.H(random_term(rng, sig, depth - 1, n_vars), random_term(rng, sig, depth - 1, n_vars));
    }

    Term random_ground(std::mt19937_64 &rng, const Sig &sig, int depth)
    {
        int roll = std::uniform_int_distribution<int>(0, 5)(rng);
        if (depth == 0 || roll < 2)
            return roll == 0 ? sig.A() : sig.B();
        if (roll < 4)
            return sig.F(random_ground(rng, sig, depth - 1));
        return sig.H(random_ground(rng, sig, depth - 1), random_ground(rng, sig, depth - 1));
    }

    bool instance_of(const Term &general, const Term &specific)
    {
        Substitution s;
        return match_into(s, general, specific);
    }

    Clause clause(std::vector<Literal> lits, std::vector<Literal> rec = {})
    {
        Clause c;
        c.literals = std::move(lits);
        c.recording = std::move(rec);
        return c;
    }
} // namespace

TEST(Unify, BindsVariableToConstant)
{
    Sig s;
    auto theta = unify(Literal::pos(s.p, {V(0)}), Literal::pos(s.p, {s.A()}));
    ASSERT_TRUE(theta);
    EXPECT_EQ(theta->size(), 1u);
    EXPECT_EQ(theta->apply(V(0)), s.A());
}

TEST(Unify, OccursCheckFails)
{
    Sig s;
    EXPECT_FALSE(unify(Literal::pos(s.p, {V(0)}), Literal::pos(s.p, {s.F(V(0))})));
}

TEST(Unify, NestedExampleAgreesWithReference)
{
    Sig s;
    // p(X, f(Y)) against p2(g(Z), f(Z)) with X=0, Y=1, Z=2
    Literal l1 = Literal::pos(s.p2, {V(0), s.F(V(1))});
    Literal l2 = Literal::pos(s.p2, {s.G(V(2)), s.F(V(2))});
    auto theta = unify(l1, l2);
    ASSERT_TRUE(theta);
    EXPECT_EQ(theta->apply(l1), theta->apply(l2));
    EXPECT_EQ(theta->apply(V(0)), s.G(V(2)));
    EXPECT_EQ(theta->apply(V(1)), V(2));
    EXPECT_EQ(theta->apply(V(2)), V(2));

    auto ref = robinson({{l1.args[0], l2.args[0]}, {l1.args[1], l2.args[1]}});
    ASSERT_TRUE(ref);
    EXPECT_EQ(ref->size(), theta->size());
    for (const auto &[v, t] : *ref)
        EXPECT_EQ(theta->apply(V(v)), t);
}

TEST(Unify, DifferentPredicatesOrPolarityIgnoredButPredicateMatters)
{
    Sig s;
    EXPECT_FALSE(unify(Literal::pos(s.p, {V(0)}), Literal::pos(s.q, {V(0)})));
    EXPECT_FALSE(unify(Literal::pos(s.p, {s.A()}), Literal::pos(s.p, {s.B()})));
}

TEST(Unify, ResultIsIdempotent)
{
    Sig s;
    auto theta = unify(Literal::pos(s.p2, {V(0), V(1)}), Literal::pos(s.p2, {V(1), s.F(V(2))}));
    ASSERT_TRUE(theta);
    EXPECT_TRUE(theta->is_idempotent());
}

TEST(SimultaneousMgu, IdenticalAtomsGiveIdentity)
{
    Sig s;
    auto theta = simultaneous_mgu({Literal::neg(s.at1, {V(0)}), Literal::neg(s.at1, {V(0)})});
    ASSERT_TRUE(theta);
    EXPECT_TRUE(theta->empty());
}

TEST(SimultaneousMgu, BindsToConstant)
{
    Sig s;
    auto theta = simultaneous_mgu({Literal::neg(s.at1, {V(0)}), Literal::neg(s.at1, {s.A()})});
    ASSERT_TRUE(theta);
    EXPECT_EQ(theta->apply(V(0)), s.A());
}

TEST(SimultaneousMgu, ThreeAtomsUnifyToCommonInstance)
{
    SymbolTable symbols;
    SymbolId at = symbols.answer_predicate(2);
    SymbolId f = symbols.function("f", 1);
    SymbolId b = symbols.constant("b");
    // @(f(X), Y), @(Z, b), @(Z, b) with X=0, Y=1, Z=2
    std::vector<Literal> atoms{Literal::neg(at, {Term::app(f, {V(0)}), V(1)}),
                               Literal::neg(at, {V(2), Term::app(b)}),
                               Literal::neg(at, {V(2), Term::app(b)})};
    auto theta = simultaneous_mgu(atoms);
    ASSERT_TRUE(theta);
    EXPECT_EQ(theta->apply(V(2)), Term::app(f, {V(0)}));
    EXPECT_EQ(theta->apply(V(1)), Term::app(b));
    EXPECT_EQ(theta->apply(V(0)), V(0));
    for (const Literal &l : atoms)
        EXPECT_EQ(theta->apply(l), theta->apply(atoms[0]));
}

TEST(SimultaneousMgu, DistinctConstantsFail)
{
    Sig s;
    EXPECT_FALSE(simultaneous_mgu({Literal::neg(s.at1, {s.A()}), Literal::neg(s.at1, {s.B()})}));
}

TEST(Apply, EmptySubstitutionIsIdentity)
{
    Sig s;
    Clause c = clause({Literal::pos(s.p, {V(0)})}, {Literal::pos(s.q, {V(0)})});
    Clause d = Substitution{}.apply(c);
    EXPECT_EQ(d.literals, c.literals);
    EXPECT_EQ(d.recording, c.recording);
}

TEST(Apply, InstantiatesBothParts)
{
    Sig s;
    Substitution theta;
    theta.bind(0, s.A());
    Clause d = theta.apply(clause({Literal::pos(s.p, {V(0)})}, {Literal::pos(s.q, {V(0)})}));
    EXPECT_EQ(d.literals[0], Literal::pos(s.p, {s.A()}));
    EXPECT_EQ(d.recording[0], Literal::pos(s.q, {s.A()}));
}

TEST(Apply, RenamingKeepsMultiplicity)
{
    Sig s;
    Substitution theta;
    theta.bind(0, V(1));
    Clause d = theta.apply(clause({Literal::pos(s.p, {V(0)})},
                                  {Literal::pos(s.q, {V(0)}), Literal::pos(s.q, {V(0)})}));
    ASSERT_EQ(d.recording.size(), 2u);
    EXPECT_EQ(d.recording[0], Literal::pos(s.q, {V(1)}));
    EXPECT_EQ(d.recording[1], Literal::pos(s.q, {V(1)}));
}

TEST(Subsumes, InstanceWithExtraLiterals)
{
    Sig s;
    Clause general = clause({Literal::pos(s.p, {V(0)})}, {Literal::pos(s.q, {V(0)})});
    Clause specific = clause({Literal::pos(s.p, {s.A()}), Literal::pos(s.r, {s.B()})},
                             {Literal::pos(s.q, {s.A()}), Literal::pos(s.s, {s.C()})});
    EXPECT_TRUE(subsumes(general, specific));
    EXPECT_FALSE(subsumes(specific, general));
}

namespace
{
    // Exhaustive multiset-subsumption check over ground substitutions drawn from
    // the given constants. Sound for the function-free clauses used below.
    bool brute_subsumes(const Clause &g, const Clause &sp, const std::vector<SymbolId> &consts)
    {
        std::vector<VarId> vars = clause_vars(g);
        std::vector<std::size_t> pick(vars.size(), 0);
        auto fits = [](std::vector<Literal> small, std::vector<Literal> big)
        {
            for (const Literal &l : small)
            {
                auto it = std::find(big.begin(), big.end(), l);
                if (it == big.end())
                    return false;
                big.erase(it);
            }
            return true;
        };
        for (;;)
        {
            Substitution theta;
            for (std::size_t i = 0; i < vars.size(); ++i)
                theta.bind(vars[i], Term::app(consts[pick[i]]));
            Clause inst = theta.apply(g);
            if (fits(inst.literals, sp.literals) && fits(inst.recording, sp.recording))
                return true;
            std::size_t i = 0;
            while (i < pick.size() && ++pick[i] == consts.size())
                pick[i++] = 0;
            if (i == pick.size())
                return false;
        }
    }
} // namespace

TEST(Subsumes, TwoLiteralsCannotCollapseIntoOne)
{
    Sig s;
    Clause general = clause({Literal::pos(s.p, {V(0)}), Literal::pos(s.p, {V(1)})});
    Clause specific = clause({Literal::pos(s.p, {s.A()})});
    EXPECT_FALSE(subsumes(general, specific));
    EXPECT_FALSE(brute_subsumes(general, specific, {s.a, s.b, s.c}));
}

TEST(Subsumes, RecordingMultiplicityCounts)
{
    Sig s;
    Clause general = clause({}, {Literal::pos(s.q, {V(0)}), Literal::pos(s.q, {V(0)})});
    Clause specific = clause({}, {Literal::pos(s.q, {s.A()})});
    EXPECT_FALSE(subsumes(general, specific));
    EXPECT_FALSE(brute_subsumes(general, specific, {s.a, s.b, s.c}));
    Clause twice = clause({}, {Literal::pos(s.q, {s.A()}), Literal::pos(s.q, {s.A()})});
    EXPECT_TRUE(subsumes(general, twice));
}

TEST(Subsumes, SameSubstitutionAcrossParts)
{
    Sig s;
    Clause general = clause({Literal::pos(s.p, {V(0)})}, {Literal::pos(s.q, {V(0)})});
    Clause specific = clause({Literal::pos(s.p, {s.A()})}, {Literal::pos(s.q, {s.B()})});
    EXPECT_FALSE(subsumes(general, specific));
    EXPECT_FALSE(brute_subsumes(general, specific, {s.a, s.b, s.c}));
}

TEST(Subsumes, OrdinaryLiteralsDoNotMatchRecordingOnes)
{
    Sig s;
    Clause general = clause({Literal::pos(s.q, {V(0)})});
    Clause specific = clause({}, {Literal::pos(s.q, {s.A()})});
    EXPECT_FALSE(subsumes(general, specific));
}

TEST(Subsumes, AgreesWithBruteForceOnRandomGroundTargets)
{
    Sig s;
    std::mt19937_64 rng(7);
    const std::vector<SymbolId> preds{s.p, s.q};
    const std::vector<SymbolId> consts{s.a, s.b};
    auto lit = [&](bool ground)
    {
        SymbolId pr = preds[rng() % 2];
        Term t = (!ground && rng() % 2) ? V(static_cast<VarId>(rng() % 2)) : Term::app(consts[rng() % 2]);
        return Literal::pos(pr, {t});
    };
    for (int trial = 0; trial < 500; ++trial)
    {
        Clause g, sp;
        for (int i = 0, n = static_cast<int>(rng() % 3); i < n; ++i)
            g.literals.push_back(lit(false));
        for (int i = 0, n = static_cast<int>(rng() % 3); i < n; ++i)
            g.recording.push_back(lit(false));
        for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i)
            sp.literals.push_back(lit(true));
        for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i)
            sp.recording.push_back(lit(true));
        EXPECT_EQ(subsumes(g, sp), brute_subsumes(g, sp, consts)) << "trial " << trial;
    }
}

TEST(Subsumes, ReflexiveAndTransitiveOnRandomChains)
{
    Sig s;
    std::mt19937_64 rng(11);
    const std::vector<SymbolId> preds{s.p, s.q, s.r};
    int chains = 0;
    for (int trial = 0; trial < 300; ++trial)
    {
        Clause c1;
        for (int i = 0, n = 1 + static_cast<int>(rng() % 3); i < n; ++i)
            c1.literals.push_back(Literal(rng() % 2, preds[rng() % 3], {random_term(rng, s, 2, 3)}));
        for (int i = 0, n = static_cast<int>(rng() % 3); i < n; ++i)
            c1.recording.push_back(Literal::pos(preds[rng() % 3], {random_term(rng, s, 2, 3)}));
        EXPECT_TRUE(subsumes(c1, c1));

        // c2 = c1 sigma plus extra literals, c3 = c2 tau plus extra literals
        auto extend = [&](const Clause &c)
        {
            Substitution sigma;
            for (VarId v = 0; v < 3; ++v)
                if (rng() % 2)
                    sigma.bind(v, random_term(rng, s, 1, 3));
            Clause out = sigma.apply(c);
            if (rng() % 2)
                out.literals.push_back(Literal::pos(s.s, {random_term(rng, s, 1, 3)}));
            if (rng() % 2)
                out.recording.push_back(Literal::pos(s.s, {random_term(rng, s, 1, 3)}));
            return out;
        };
        Clause c2 = extend(c1);
        Clause c3 = extend(c2);
        if (subsumes(c1, c2) && subsumes(c2, c3))
        {
            ++chains;
            EXPECT_TRUE(subsumes(c1, c3)) << "trial " << trial;
        }
    }
    EXPECT_GT(chains, 100);
}

TEST(Unify, RandomPairsAreSoundAndAgreeWithReference)
{
    Sig s;
    std::mt19937_64 rng(42);
    int unified = 0;
    for (int trial = 0; trial < 3000; ++trial)
    {
        Term t1 = random_term(rng, s, 3, 4);
        Term t2 = random_term(rng, s, 3, 4);
        auto theta = unify(t1, t2);
        auto ref = robinson({{t1, t2}});
        ASSERT_EQ(theta.has_value(), ref.has_value()) << "trial " << trial;
        if (!theta)
            continue;
        ++unified;
        EXPECT_EQ(theta->apply(t1), theta->apply(t2));
        EXPECT_TRUE(theta->is_idempotent());
        // Most general unifiers are unique up to renaming: each is an instance of the other.
        Substitution r;
        for (const auto &[v, t] : *ref)
            r.bind(v, t);
        EXPECT_TRUE(instance_of(theta->apply(t1), r.apply(t1)));
        EXPECT_TRUE(instance_of(r.apply(t1), theta->apply(t1)));
    }
    EXPECT_GT(unified, 300);
}

TEST(Unify, CommonInstanceByConstructionIsCovered)
{
    Sig s;
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 2000; ++trial)
    {
        // Build a ground target and two generalisations of it over disjoint variables.
        Term target = random_ground(rng, s, 3);
        VarId next = 0;
        auto generalise = [&](const Term &t, auto &self) -> Term
        {
            if (rng() % 4 == 0)
                return V(next++);
            if (t.args().empty())
                return t;
            std::vector<Term> args;
            for (const Term &a : t.args())
                args.push_back(self(a, self));
            return Term::app(t.functor(), args);
        };
        Term g1 = generalise(target, generalise);
        Term g2 = generalise(target, generalise);
        auto theta = unify(g1, g2);
        ASSERT_TRUE(theta) << "trial " << trial;
        EXPECT_TRUE(instance_of(theta->apply(g1), target));
    }
}

TEST(Ordering, PrecedenceFollowsDeclarationOrder)
{
    Sig s;
    KboOrdering ord;
    EXPECT_EQ(ord.compare(Literal::pos(s.p, {s.A()}), Literal::pos(s.q, {s.A()})), Comparison::Greater);
    EXPECT_EQ(ord.compare(s.A(), s.B()), Comparison::Greater);
    EXPECT_EQ(ord.compare(s.F(V(0)), V(0)), Comparison::Greater);
    EXPECT_EQ(ord.compare(V(0), V(1)), Comparison::Incomparable);
    EXPECT_EQ(ord.compare(Literal::neg(s.p, {s.A()}), Literal::pos(s.p, {s.A()})), Comparison::Greater);
}

TEST(Ordering, HeavierTermsWinWhenVariablesAllow)
{
    Sig s;
    KboOrdering ord;
    EXPECT_EQ(ord.compare(s.F(s.F(V(0))), s.G(V(0))), Comparison::Greater);
    EXPECT_EQ(ord.compare(s.F(V(0)), s.G(V(1))), Comparison::Incomparable);
    EXPECT_EQ(ord.compare(s.H(V(0), V(0)), s.F(V(0))), Comparison::Greater);
}

TEST(Ordering, SubstitutionPropertyOnRandomLiterals)
{
    Sig s;
    KboOrdering ord;
    std::mt19937_64 rng(99);
    const std::vector<SymbolId> preds{s.p, s.q, s.r};
    int greater = 0;
    for (int trial = 0; trial < 5000; ++trial)
    {
        Literal l1(rng() % 2, preds[rng() % 3], {random_term(rng, s, 2, 3)});
        Literal l2(rng() % 2, preds[rng() % 3], {random_term(rng, s, 2, 3)});
        if (ord.compare(l1, l2) != Comparison::Greater)
            continue;
        ++greater;
        Substitution theta;
        for (VarId v = 0; v < 3; ++v)
            theta.bind(v, random_ground(rng, s, 2));
        EXPECT_EQ(ord.compare(theta.apply(l1), theta.apply(l2)), Comparison::Greater) << "trial " << trial;
    }
    EXPECT_GT(greater, 500);
}

TEST(Eligible, UnorderedSelectsEverything)
{
    Sig s;
    Clause c = clause({Literal::neg(s.p, {V(0)}), Literal::pos(s.q, {V(0)})});
    EXPECT_EQ(eligible_literals(c, Calculus::Unordered), (std::vector<std::size_t>{0, 1}));
}

TEST(Eligible, SelectionPicksHeavyNegativeLiteral)
{
    Sig s;
    Clause c = clause({Literal::neg(s.p, {s.F(V(0))}), Literal::pos(s.q, {V(0)})});
    EXPECT_EQ(eligible_literals(c, Calculus::OrderedSelection), (std::vector<std::size_t>{0}));
    EXPECT_EQ(eligible_literals(c, Calculus::Ordered), (std::vector<std::size_t>{0}));
}

TEST(Eligible, PositiveClauseUsesMaximalLiteral)
{
    Sig s;
    Clause c = clause({Literal::pos(s.q, {s.A()}), Literal::pos(s.p, {s.A()})});
    EXPECT_EQ(eligible_literals(c, Calculus::OrderedSelection), (std::vector<std::size_t>{1}));
}

TEST(Eligible, EmptyOrdinaryPartHasNoPositions)
{
    Sig s;
    Clause c = clause({}, {Literal::pos(s.q, {V(0)})});
    for (Calculus calc : {Calculus::Unordered, Calculus::Ordered, Calculus::OrderedSelection})
        EXPECT_TRUE(eligible_literals(c, calc).empty());
}

TEST(Eligible, NonEmptyClauseAlwaysHasAnEligibleLiteral)
{
    Sig s;
    std::mt19937_64 rng(3);
    const std::vector<SymbolId> preds{s.p, s.q, s.r};
    for (int trial = 0; trial < 500; ++trial)
    {
        Clause c;
        for (int i = 0, n = 1 + static_cast<int>(rng() % 4); i < n; ++i)
            c.literals.push_back(Literal(rng() % 2, preds[rng() % 3], {random_term(rng, s, 2, 3)}));
        for (Calculus calc : {Calculus::Ordered, Calculus::OrderedSelection})
            EXPECT_FALSE(eligible_literals(c, calc).empty());
    }
}

TEST(Variants, RenamedClausesAreVariants)
{
    Sig s;
    Clause c1 = clause({Literal::pos(s.p2, {V(0), V(1)})}, {Literal::pos(s.q, {V(1)})});
    Clause c2 = clause({Literal::pos(s.p2, {V(5), V(3)})}, {Literal::pos(s.q, {V(3)})});
    Clause c3 = clause({Literal::pos(s.p2, {V(5), V(5)})}, {Literal::pos(s.q, {V(5)})});
    EXPECT_TRUE(is_variant(c1, c2));
    EXPECT_FALSE(is_variant(c1, c3));
}
