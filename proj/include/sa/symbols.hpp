#pragma once

#include "error.hpp"

#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace sa
{

    using SymbolId = std::uint32_t;

    enum class PredicateKind
    {
        Ordinary,
        Database,
        Answer
    };

    struct PredicateInfo
    {
        std::string name;
        std::size_t arity;
        PredicateKind kind;
    };

    struct FunctionInfo
    {
        std::string name;
        std::size_t arity;
    };

    /**
     * Interned predicate and function symbols of one query session.
     *
     * Append-only. Symbol ids are dense and assigned in declaration order, which
     * doubles as the precedence used by the term ordering (earlier is greater).
     * Lookups and insertions are guarded by an internal lock, so a table can be
     * shared between the saturation thread and answer consumers.
     */
    class SymbolTable
    {
    public:
        static constexpr std::string_view kAnswerName = "@";

        SymbolTable() = default;
        SymbolTable(const SymbolTable &) = delete;
        SymbolTable &operator=(const SymbolTable &) = delete;

        /// Interns a predicate. A Database kind upgrades an existing Ordinary symbol.
        SymbolId predicate(std::string_view name, std::size_t arity,
                           PredicateKind kind = PredicateKind::Ordinary)
        {
            if (kind == PredicateKind::Answer)
                return answer_predicate(arity);
            std::unique_lock lock(mutex_);
            if (auto it = predicate_index_.find(std::string(name)); it != predicate_index_.end())
            {
                PredicateInfo &info = predicates_[it->second];
                if (info.arity != arity)
                    throw ArityClash("predicate " + info.name + " declared with arity " +
                                     std::to_string(info.arity) + ", used with arity " +
                                     std::to_string(arity));
                if (kind == PredicateKind::Database)
                    info.kind = PredicateKind::Database;
                return it->second;
            }
            auto id = static_cast<SymbolId>(predicates_.size());
            predicates_.push_back({std::string(name), arity, kind});
            predicate_index_.emplace(std::string(name), id);
            return id;
        }

        /// The unique answer predicate `@`. Its arity is fixed by the first call.
        SymbolId answer_predicate(std::size_t arity)
        {
            std::unique_lock lock(mutex_);
            if (answer_)
            {
                if (predicates_[*answer_].arity != arity)
                    throw ArityClash("answer predicate already declared with arity " +
                                     std::to_string(predicates_[*answer_].arity));
                return *answer_;
            }
            auto id = static_cast<SymbolId>(predicates_.size());
            predicates_.push_back({std::string(kAnswerName), arity, PredicateKind::Answer});
            predicate_index_.emplace(std::string(kAnswerName), id);
            answer_ = id;
            return id;
        }

        std::optional<SymbolId> answer_predicate() const
        {
            std::shared_lock lock(mutex_);
            return answer_;
        }

        SymbolId function(std::string_view name, std::size_t arity)
        {
            std::unique_lock lock(mutex_);
            if (auto it = function_index_.find(std::string(name)); it != function_index_.end())
            {
                const FunctionInfo &info = functions_[it->second];
                if (info.arity != arity)
                    throw ArityClash("function " + info.name + " declared with arity " +
                                     std::to_string(info.arity) + ", used with arity " +
                                     std::to_string(arity));
                return it->second;
            }
            auto id = static_cast<SymbolId>(functions_.size());
            functions_.push_back({std::string(name), arity});
            function_index_.emplace(std::string(name), id);
            return id;
        }

        SymbolId constant(std::string_view name) { return function(name, 0); }

        std::optional<SymbolId> find_predicate(std::string_view name) const
        {
            std::shared_lock lock(mutex_);
            auto it = predicate_index_.find(std::string(name));
            if (it == predicate_index_.end())
                return std::nullopt;
            return it->second;
        }

        std::optional<SymbolId> find_function(std::string_view name) const
        {
            std::shared_lock lock(mutex_);
            auto it = function_index_.find(std::string(name));
            if (it == function_index_.end())
                return std::nullopt;
            return it->second;
        }

        // Elements of a deque never move on push_back, so references stay valid.
        const PredicateInfo &pred(SymbolId id) const
        {
            std::shared_lock lock(mutex_);
            return predicates_.at(id);
        }

        const FunctionInfo &func(SymbolId id) const
        {
            std::shared_lock lock(mutex_);
            return functions_.at(id);
        }

        bool is_database(SymbolId id) const { return pred(id).kind == PredicateKind::Database; }
        bool is_answer(SymbolId id) const { return pred(id).kind == PredicateKind::Answer; }

        std::size_t predicate_count() const
        {
            std::shared_lock lock(mutex_);
            return predicates_.size();
        }

        std::size_t function_count() const
        {
            std::shared_lock lock(mutex_);
            return functions_.size();
        }

    private:
        mutable std::shared_mutex mutex_;
        std::deque<PredicateInfo> predicates_;
        std::deque<FunctionInfo> functions_;
        std::unordered_map<std::string, SymbolId> predicate_index_;
        std::unordered_map<std::string, SymbolId> function_index_;
        std::optional<SymbolId> answer_;
    };

} // namespace sa
