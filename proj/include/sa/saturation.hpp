#pragma once

#include "channel.hpp"
#include "fact_store.hpp"
#include "ordering.hpp"
#include "prefix.hpp"
#include "subsumption.hpp"
#include "unify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace sa
{

    inline constexpr ClauseId kNoClause = static_cast<ClauseId>(-1);

    // ------------------------------------------------------------------
    // Inference rules

    /// Result of one inference before variable normalization.
    struct Inference
    {
        Clause conclusion;
        Substitution unifier;
        VarId offset = 0; // shift applied to the second premise
    };

    namespace detail
    {
        inline bool contains(const std::vector<std::size_t> &v, std::size_t x)
        {
            return std::find(v.begin(), v.end(), x) != v.end();
        }
    } // namespace detail

    /**
     * Binary resolution on clauses with recording literals: from C1 \/ A | g1 and
     * C2 \/ ~B | g2 derive (C1 \/ C2)theta | g1 theta, g2 theta with theta = mgu(A, B).
     * `pos1` must be a positive literal of c1 and `pos2` a negative literal of c2,
     * both eligible under `calculus`. The second premise is renamed apart.
     */
    inline std::optional<Inference> resolve(const Clause &c1, std::size_t pos1, const Clause &c2, std::size_t pos2,
                                            Calculus calculus = Calculus::Unordered, const KboOrdering &ord = {})
    {
        if (pos1 >= c1.literals.size() || pos2 >= c2.literals.size())
            return std::nullopt;
        if (!c1.literals[pos1].positive || c2.literals[pos2].positive ||
            c1.literals[pos1].pred != c2.literals[pos2].pred)
            return std::nullopt;
        if (calculus != Calculus::Unordered &&
            (!detail::contains(eligible_literals(c1, calculus, ord), pos1) ||
             !detail::contains(eligible_literals(c2, calculus, ord), pos2)))
            return std::nullopt;

        Inference inf;
        inf.offset = var_bound(c1);
        Clause right = shift_vars(c2, inf.offset);
        std::optional<Substitution> theta = unify(c1.literals[pos1], right.literals[pos2]);
        if (!theta)
            return std::nullopt;
        inf.unifier = *theta;

        Clause &out = inf.conclusion;
        for (std::size_t i = 0; i < c1.literals.size(); ++i)
            if (i != pos1)
                out.literals.push_back(theta->apply(c1.literals[i]));
        for (std::size_t i = 0; i < right.literals.size(); ++i)
            if (i != pos2)
                out.literals.push_back(theta->apply(right.literals[i]));
        for (const Literal &l : c1.recording)
            out.recording.push_back(theta->apply(l));
        for (const Literal &l : right.recording)
            out.recording.push_back(theta->apply(l));
        for (const PrefixConstraint &p : c1.prefixes)
            out.prefixes.push_back({theta->apply(p.term), p.prefix});
        for (const PrefixConstraint &p : right.prefixes)
            out.prefixes.push_back({theta->apply(p.term), p.prefix});
        out.origin.kind = OriginKind::Derived;
        out.origin.rule = "resolution";
        return inf;
    }

    /// Factoring: merges ordinary literals i and j (same polarity and predicate) by their mgu.
    inline std::optional<Inference> factor(const Clause &c, std::size_t i, std::size_t j,
                                           Calculus calculus = Calculus::Unordered, const KboOrdering &ord = {})
    {
        if (i == j || i >= c.literals.size() || j >= c.literals.size())
            return std::nullopt;
        const Literal &a = c.literals[i];
        const Literal &b = c.literals[j];
        if (a.positive != b.positive || a.pred != b.pred)
            return std::nullopt;
        if (calculus != Calculus::Unordered)
        {
            std::vector<std::size_t> el = eligible_literals(c, calculus, ord);
            if (!detail::contains(el, i) || !detail::contains(el, j))
                return std::nullopt;
        }
        std::optional<Substitution> theta = unify(a, b);
        if (!theta)
            return std::nullopt;
        Inference inf;
        inf.unifier = *theta;
        Clause dropped = c;
        dropped.literals.erase(dropped.literals.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
        inf.conclusion = theta->apply(dropped);
        inf.conclusion.origin = Origin{OriginKind::Derived, "factoring", {}, {}};
        return inf;
    }

    /// Collapses syntactically identical recording literals; the ordinary part is untouched.
    inline Clause merge_recording_duplicates(const Clause &c)
    {
        Clause out = c;
        out.recording.clear();
        for (const Literal &l : c.recording)
            if (std::find(out.recording.begin(), out.recording.end(), l) == out.recording.end())
                out.recording.push_back(l);
        return out;
    }

    inline bool is_tautology(const Clause &c)
    {
        for (std::size_t i = 0; i < c.literals.size(); ++i)
            for (std::size_t j = i + 1; j < c.literals.size(); ++j)
                if (c.literals[i].positive != c.literals[j].positive && c.literals[i].same_atom(c.literals[j]))
                    return true;
        return false;
    }

    // ------------------------------------------------------------------
    // Pruning

    struct PruneOptions
    {
        bool db_literals = true;
        bool answer_literals = true;
        bool prefixes = true;
        /// Clauses with more database literals than this skip the store check.
        std::size_t db_check_max_literals = 8;
    };

    enum class PruneReason
    {
        None,
        DbConstraintUnsat,
        AnswerLiteralsUnunifiable,
        IncompatiblePrefixes
    };

    inline const char *to_string(PruneReason r)
    {
        switch (r)
        {
        case PruneReason::None:
            return "keep";
        case PruneReason::DbConstraintUnsat:
            return "db-constraint-unsat";
        case PruneReason::AnswerLiteralsUnunifiable:
            return "answer-literals-ununifiable";
        case PruneReason::IncompatiblePrefixes:
            return "incompatible-prefixes";
        }
        return "?";
    }

    struct PruneDecision
    {
        bool keep = true;
        PruneReason reason = PruneReason::None;

        static PruneDecision discard(PruneReason r) { return {false, r}; }
    };

    /// Database atoms of a recording part: its positive literals.
    inline std::vector<Literal> database_literals(const Clause &c)
    {
        std::vector<Literal> out;
        for (const Literal &l : c.recording)
            if (l.positive)
                out.push_back(l);
        return out;
    }

    /// Answer atoms of a recording part: its negative literals, returned as atoms.
    inline std::vector<Literal> answer_atoms(const Clause &c)
    {
        std::vector<Literal> out;
        for (const Literal &l : c.recording)
            if (!l.positive)
                out.push_back(l.complement());
        return out;
    }

    /**
     * Decides whether a clause can still contribute concrete answers.
     *
     * Answer check: the @-atoms must be simultaneously unifiable. Database check:
     * the database literals, instantiated by that unifier when the answer check is
     * on, must have a solution in `store`. Constraints with compound terms are
     * kept. `check_db` lets the caller skip the store lookup.
     */
    inline PruneDecision prune(const Clause &c, const FactStore *store, const PruneOptions &options,
                               const SymbolTable *symbols = nullptr, bool check_db = true)
    {
        Substitution theta;
        if (options.answer_literals)
        {
            std::vector<Literal> answers = answer_atoms(c);
            if (answers.size() >= 2)
            {
                std::optional<Substitution> mgu = simultaneous_mgu(answers);
                if (!mgu)
                    return PruneDecision::discard(PruneReason::AnswerLiteralsUnunifiable);
                theta = std::move(*mgu);
            }
        }
        if (options.prefixes && !c.prefixes.empty())
        {
            std::vector<PrefixConstraint> prefixes;
            for (const PrefixConstraint &p : c.prefixes)
                prefixes.push_back({theta.apply(p.term), p.prefix});
            if (!pref_compatible(prefixes, symbols))
                return PruneDecision::discard(PruneReason::IncompatiblePrefixes);
        }
        if (options.db_literals && check_db && store)
        {
            std::vector<Literal> db = database_literals(c);
            if (!db.empty() && db.size() <= options.db_check_max_literals)
            {
                db = theta.apply(db);
                if (is_flat(db) && !constraint_satisfiable(*store, db))
                    return PruneDecision::discard(PruneReason::DbConstraintUnsat);
            }
        }
        return {};
    }

    // ------------------------------------------------------------------
    // Given-clause saturation

    struct SaturationConfig
    {
        Calculus calculus = Calculus::Unordered;
        PruneOptions prune;
        bool subsumption = true;
        std::size_t max_derived = 100000;
        double timeout_seconds = 60.0;
        std::size_t max_answers = 0; // 0 = unlimited
        std::ostream *trace = nullptr;
    };

    enum class SaturationStatus
    {
        Saturated,
        BudgetExhausted,
        Stopped
    };

    inline const char *to_string(SaturationStatus s)
    {
        switch (s)
        {
        case SaturationStatus::Saturated:
            return "saturated";
        case SaturationStatus::BudgetExhausted:
            return "budget-exhausted";
        case SaturationStatus::Stopped:
            return "stopped";
        }
        return "?";
    }

    struct SaturationCounters
    {
        std::size_t derived = 0; // conclusions produced by inferences
        std::size_t kept = 0;
        std::size_t activated = 0;
        std::size_t tautologies = 0;
        std::size_t duplicates = 0;
        std::size_t forward_subsumed = 0;
        std::size_t backward_subsumed = 0;
        std::size_t pruned_db = 0;
        std::size_t pruned_answer = 0;
        std::size_t pruned_prefix = 0;
        std::size_t answers = 0;
    };

    struct SaturationResult
    {
        SaturationStatus status = SaturationStatus::Saturated;
        SaturationCounters counters;
    };

    /// How a stored clause was obtained from its premises.
    struct InferenceRecord
    {
        std::string rule;                    // "resolution" or "factoring"
        std::vector<ClauseId> premises;      // one premise for factoring
        std::vector<std::size_t> positions;  // literal positions used
        VarId offset = 0;                    // shift applied to the second premise
        Substitution unifier;                // over the shifted premises
        Substitution renaming;               // raw conclusion -> stored clause
        bool merged = false;                 // duplicate recording literals were merged
    };

    struct StoredClause
    {
        ClauseId id = kNoClause;
        Clause clause;
        std::size_t weight = 0;
        std::vector<ClauseId> abstractions; // abstraction leaves of the derivation
        std::optional<InferenceRecord> inference;
        std::vector<std::size_t> eligible;
        bool active = false;
        bool removed = false;
        bool answer = false;
    };

    /// A derived clause with empty ordinary part, [] | gamma.
    struct SchematicAnswer
    {
        Clause clause;
        ClauseId derivation = kNoClause;
        std::vector<ClauseId> abstractions;
    };

    /**
     * Given-clause saturation of abstraction, knowledge-base and goal clauses.
     *
     * Clauses are selected lightest first (symbol count, then age). Every derived
     * clause with an empty ordinary part is reported as a schematic answer as
     * soon as it is kept. Only one thread may call run(); request_stop() may be
     * called from any thread.
     */
    class Saturator
    {
    public:
        using AnswerCallback = std::function<bool(const SchematicAnswer &)>;

        Saturator(SaturationConfig config, const FactStore *store = nullptr, const SymbolTable *symbols = nullptr)
            : config_(std::move(config)), store_(store), symbols_(symbols) {}

        /// Adds an input clause; returns its id. Variables are normalized.
        ClauseId add_input(Clause c)
        {
            normalize_vars(c);
            StoredClause sc;
            sc.id = static_cast<ClauseId>(clauses_.size());
            if (c.origin.kind == OriginKind::Abstraction)
                sc.abstractions.push_back(sc.id);
            sc.weight = c.weight();
            sc.clause = std::move(c);
            clauses_.push_back(std::move(sc));
            inputs_.push_back(clauses_.back().id);
            return clauses_.back().id;
        }

        void request_stop() { stop_.store(true); }

        const StoredClause &clause(ClauseId id) const { return clauses_.at(id); }
        bool has_clause(ClauseId id) const { return id < clauses_.size(); }
        std::size_t clause_count() const { return clauses_.size(); }
        const std::vector<ClauseId> &inputs() const { return inputs_; }
        const SaturationCounters &counters() const { return counters_; }

        SaturationResult run(const AnswerCallback &on_answer)
        {
            on_answer_ = &on_answer;
            start_ = std::chrono::steady_clock::now();
            status_.reset();

            for (ClauseId id : inputs_)
            {
                StoredClause &sc = clauses_[id];
                if (sc.clause.origin.kind != OriginKind::Abstraction && is_tautology(sc.clause))
                {
                    ++counters_.tautologies;
                    sc.removed = true;
                    continue;
                }
                PruneDecision d = prune(sc.clause, store_, config_.prune, symbols_);
                if (!d.keep)
                {
                    count_prune(d.reason);
                    sc.removed = true;
                    continue;
                }
                if (sc.clause.empty_ordinary())
                {
                    emit_answer(id);
                    continue;
                }
                register_variant(id);
                passive_.push({sc.weight, id});
            }

            while (!status_)
            {
                if (stop_.load())
                {
                    status_ = SaturationStatus::Stopped;
                    break;
                }
                if (out_of_time())
                {
                    status_ = SaturationStatus::BudgetExhausted;
                    break;
                }
                if (passive_.empty())
                {
                    status_ = SaturationStatus::Saturated;
                    break;
                }
                ClauseId given = passive_.top().second;
                passive_.pop();
                StoredClause &g = clauses_[given];
                if (g.removed)
                    continue;
                if (config_.subsumption && forward_subsumed(g.clause, given))
                {
                    ++counters_.forward_subsumed;
                    g.removed = true;
                    continue;
                }
                if (config_.subsumption)
                    backward_subsume(given);
                activate(given);
                generate(given);
            }
            on_answer_ = nullptr;
            return {*status_, counters_};
        }

    private:
        using QueueEntry = std::pair<std::size_t, ClauseId>;

        bool out_of_time() const
        {
            auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
            return elapsed > config_.timeout_seconds;
        }

        void count_prune(PruneReason r)
        {
            switch (r)
            {
            case PruneReason::DbConstraintUnsat:
                ++counters_.pruned_db;
                break;
            case PruneReason::AnswerLiteralsUnunifiable:
                ++counters_.pruned_answer;
                break;
            case PruneReason::IncompatiblePrefixes:
                ++counters_.pruned_prefix;
                break;
            case PruneReason::None:
                break;
            }
        }

        void activate(ClauseId id)
        {
            StoredClause &sc = clauses_[id];
            sc.active = true;
            sc.eligible = eligible_literals(sc.clause, config_.calculus, ordering_);
            active_.push_back(id);
            ++counters_.activated;
            if (config_.trace)
                *config_.trace << "[given " << id << "] " << describe(sc.clause) << "\n";
        }

        std::string describe(const Clause &c) const
        {
            return symbols_ ? to_string(c, *symbols_) : std::string("<clause>");
        }

        bool forward_subsumed(const Clause &c, ClauseId self) const
        {
            for (ClauseId a : active_)
                if (a != self && !clauses_[a].removed && subsumes(clauses_[a].clause, c))
                    return true;
            for (ClauseId a : answers_)
                if (a != self && subsumes(clauses_[a].clause, c))
                    return true;
            return false;
        }

        void backward_subsume(ClauseId given)
        {
            const Clause &g = clauses_[given].clause;
            std::vector<ClauseId> kept;
            kept.reserve(active_.size());
            for (ClauseId a : active_)
            {
                if (subsumes(g, clauses_[a].clause))
                {
                    clauses_[a].removed = true;
                    clauses_[a].active = false;
                    ++counters_.backward_subsumed;
                }
                else
                    kept.push_back(a);
            }
            active_ = std::move(kept);
        }

        // Variant detection bucket key: weight, part sizes and predicate signature.
        std::string variant_key(const Clause &c) const
        {
            std::vector<std::pair<SymbolId, int>> sig;
            for (const Literal &l : c.literals)
                sig.emplace_back(l.pred, l.positive ? 1 : 0);
            for (const Literal &l : c.recording)
                sig.emplace_back(l.pred, l.positive ? 3 : 2);
            std::sort(sig.begin(), sig.end());
            std::string key = std::to_string(c.weight()) + "/" + std::to_string(c.prefixes.size());
            for (const auto &[p, k] : sig)
                key += "," + std::to_string(p) + ":" + std::to_string(k);
            return key;
        }

        bool is_duplicate(const Clause &c) const
        {
            auto it = variants_.find(variant_key(c));
            if (it == variants_.end())
                return false;
            for (ClauseId id : it->second)
                if (is_variant(clauses_[id].clause, c))
                    return true;
            return false;
        }

        void register_variant(ClauseId id) { variants_[variant_key(clauses_[id].clause)].push_back(id); }

        /// True if the conclusion's recording part is a renaming of a single premise's,
        /// all other premises contributing nothing; then the store check cannot change.
        bool recording_unchanged(const InferenceRecord &rec) const
        {
            std::vector<ClauseId> with_gamma;
            for (std::size_t k = 0; k < rec.premises.size(); ++k)
                if (!clauses_[rec.premises[k]].clause.recording.empty())
                    with_gamma.push_back(static_cast<ClauseId>(k));
            if (with_gamma.size() != 1)
                return false;
            std::size_t k = with_gamma[0];
            const Clause &p = clauses_[rec.premises[k]].clause;
            VarId shift = (rec.rule == "resolution" && k == 1) ? rec.offset : 0;
            std::vector<VarId> vars;
            for (const Literal &l : p.recording)
                collect_vars(l, vars);
            std::vector<VarId> images;
            for (VarId v : vars)
            {
                Term t = rec.unifier.apply(Term::var(v + shift));
                if (!t.is_var())
                    return false;
                if (std::find(images.begin(), images.end(), t.var_id()) != images.end())
                    return false;
                images.push_back(t.var_id());
            }
            return true;
        }

        void generate(ClauseId given)
        {
            // Copy: new clauses may be appended to clauses_ during generation.
            const std::vector<ClauseId> partners = active_;
            for (ClauseId other : partners)
            {
                if (clauses_[given].removed)
                    return;
                if (clauses_[other].removed)
                    continue;
                const std::vector<std::size_t> g_el = clauses_[given].eligible;
                const std::vector<std::size_t> o_el = clauses_[other].eligible;
                for (std::size_t i : g_el)
                {
                    for (std::size_t j : o_el)
                    {
                        if (status_)
                            return;
                        const Literal &gl = clauses_[given].clause.literals[i];
                        const Literal &ol = clauses_[other].clause.literals[j];
                        if (gl.pred != ol.pred || gl.positive == ol.positive)
                            continue;
                        if (gl.positive)
                            try_resolve(given, i, other, j);
                        else if (other != given)
                            try_resolve(other, j, given, i);
                    }
                }
            }
            const std::vector<std::size_t> el = clauses_[given].eligible;
            for (std::size_t a = 0; a < el.size(); ++a)
                for (std::size_t b = a + 1; b < el.size(); ++b)
                {
                    if (status_)
                        return;
                    const Clause &c = clauses_[given].clause;
                    std::optional<Inference> inf = factor(c, el[a], el[b]);
                    if (!inf)
                        continue;
                    InferenceRecord rec{"factoring", {given}, {el[a], el[b]}, 0, inf->unifier, {}, false};
                    process_new(std::move(inf->conclusion), std::move(rec));
                }
        }

        void try_resolve(ClauseId pos_id, std::size_t i, ClauseId neg_id, std::size_t j)
        {
            // Eligibility was checked through the cached positions.
            std::optional<Inference> inf = resolve(clauses_[pos_id].clause, i, clauses_[neg_id].clause, j);
            if (!inf)
                return;
            InferenceRecord rec{"resolution", {pos_id, neg_id}, {i, j}, inf->offset, inf->unifier, {}, false};
            process_new(std::move(inf->conclusion), std::move(rec));
        }

        void process_new(Clause c, InferenceRecord rec)
        {
            ++counters_.derived;
            if (counters_.derived >= config_.max_derived)
                status_ = SaturationStatus::BudgetExhausted;

            rec.renaming = normalize_vars(c);
            c.origin.kind = OriginKind::Derived;
            c.origin.rule = rec.rule;
            c.origin.premises = rec.premises;

            if (is_tautology(c))
            {
                ++counters_.tautologies;
                return;
            }
            bool check_db = !recording_unchanged(rec);
            PruneDecision d = prune(c, store_, config_.prune, symbols_, check_db);
            if (!d.keep)
            {
                count_prune(d.reason);
                return;
            }
            if (c.empty_ordinary())
            {
                Clause merged = merge_recording_duplicates(c);
                rec.merged = merged.recording.size() != c.recording.size();
                c = std::move(merged);
            }
            if (is_duplicate(c))
            {
                ++counters_.duplicates;
                return;
            }
            if (config_.subsumption && forward_subsumed(c, kNoClause))
            {
                ++counters_.forward_subsumed;
                return;
            }

            StoredClause sc;
            sc.id = static_cast<ClauseId>(clauses_.size());
            sc.weight = c.weight();
            for (ClauseId p : rec.premises)
                sc.abstractions.insert(sc.abstractions.end(), clauses_[p].abstractions.begin(),
                                       clauses_[p].abstractions.end());
            std::sort(sc.abstractions.begin(), sc.abstractions.end());
            sc.abstractions.erase(std::unique(sc.abstractions.begin(), sc.abstractions.end()),
                                  sc.abstractions.end());
            sc.clause = std::move(c);
            sc.inference = std::move(rec);
            clauses_.push_back(std::move(sc));
            ClauseId id = clauses_.back().id;
            ++counters_.kept;
            register_variant(id);
            if (config_.trace)
                *config_.trace << "[" << id << "] " << describe(clauses_[id].clause) << "  <- "
                               << clauses_[id].inference->rule << " " << premises_string(id) << "\n";

            if (clauses_[id].clause.empty_ordinary())
                emit_answer(id);
            else
                passive_.push({clauses_[id].weight, id});
        }

        std::string premises_string(ClauseId id) const
        {
            std::string out;
            for (ClauseId p : clauses_[id].inference->premises)
                out += (out.empty() ? "" : ",") + std::to_string(p);
            return out;
        }

        void emit_answer(ClauseId id)
        {
            StoredClause &sc = clauses_[id];
            sc.answer = true;
            answers_.push_back(id);
            ++counters_.answers;
            SchematicAnswer sa{sc.clause, id, sc.abstractions};
            bool go_on = (*on_answer_)(sa);
            if (!go_on)
                status_ = SaturationStatus::Stopped;
            else if (config_.max_answers && counters_.answers >= config_.max_answers)
                status_ = SaturationStatus::BudgetExhausted;
        }

        SaturationConfig config_;
        const FactStore *store_;
        const SymbolTable *symbols_;
        KboOrdering ordering_;

        std::deque<StoredClause> clauses_;
        std::vector<ClauseId> inputs_;
        std::vector<ClauseId> active_;
        std::vector<ClauseId> answers_;
        std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> passive_;
        std::unordered_map<std::string, std::vector<ClauseId>> variants_;

        SaturationCounters counters_;
        std::optional<SaturationStatus> status_;
        std::atomic<bool> stop_{false};
        std::chrono::steady_clock::time_point start_;
        const AnswerCallback *on_answer_ = nullptr;
    };

    /**
     * Runs the saturator on a worker thread, pushing schematic answers into
     * `channel` as they are found and closing it at the end. The returned thread
     * must be joined; the result is written to `result` before the channel closes.
     */
    inline std::thread saturate_async(Saturator &saturator, Channel<SchematicAnswer> &channel,
                                      SaturationResult &result)
    {
        return std::thread([&saturator, &channel, &result]
                           {
            result = saturator.run([&channel](const SchematicAnswer &a) {
                channel.push(a);
                return true;
            });
            channel.close(); });
    }

} // namespace sa
