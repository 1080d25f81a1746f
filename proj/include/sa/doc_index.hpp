#pragma once

// Semantic document index: documents are represented by abstraction clauses,
// optionally narrowed by URI-prefix constraints. A document is potentially
// relevant to a query when one of its clauses is a leaf in the derivation of a
// schematic answer.

#include "parser.hpp"
#include "provenance.hpp"
#include "saturation.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace sa
{

    struct DocumentRecord
    {
        std::string id;
        std::vector<Clause> clauses;
    };

    class DocumentIndex
    {
    public:
        /// Throws Error when `id` is already registered or a prefix constraint
        /// mentions a variable outside its clause.
        void register_document(const std::string &id, std::vector<Clause> clauses)
        {
            if (by_id_.count(id))
                throw Error("duplicate document id " + id);
            for (Clause &c : clauses)
            {
                std::vector<VarId> vars;
                for (const Literal &l : c.literals)
                    collect_vars(l, vars);
                for (const Literal &l : c.recording)
                    collect_vars(l, vars);
                for (const PrefixConstraint &p : c.prefixes)
                    if (!p.term.is_var() ||
                        std::find(vars.begin(), vars.end(), p.term.var_id()) == vars.end())
                        throw Error("document " + id + ": prefix constraint on a variable not in its clause");
                c.origin.kind = OriginKind::Abstraction;
                c.origin.document = id;
            }
            by_id_[id] = documents_.size();
            documents_.push_back({id, std::move(clauses)});
        }

        void register_document(const DocumentSpec &spec) { register_document(spec.id, spec.clauses); }

        const std::vector<DocumentRecord> &documents() const { return documents_; }

        /// Adds every registered clause to the saturator's input pool.
        void load_into(Saturator &s)
        {
            for (const DocumentRecord &d : documents_)
                for (const Clause &c : d.clauses)
                    owner_[s.add_input(c)] = d.id;
        }

        /// Document owning a loaded clause, or nullptr for clauses of other origin.
        const std::string *document_of(ClauseId id) const
        {
            auto it = owner_.find(id);
            return it == owner_.end() ? nullptr : &it->second;
        }

        /// Documents whose abstraction clauses contributed to `answer`.
        std::set<std::string> relevant_documents(const SchematicAnswer &answer) const
        {
            std::set<std::string> out;
            for (ClauseId id : answer.abstractions)
            {
                const std::string *doc = document_of(id);
                if (!doc)
                    throw Error("abstraction clause " + std::to_string(id) + " is not owned by any document");
                out.insert(*doc);
            }
            return out;
        }

        /// Same set computed by walking the stored derivation.
        std::set<std::string> relevant_documents(const Saturator &s, ClauseId derivation) const
        {
            std::set<std::string> out;
            for (ClauseId leaf : abstraction_leaves(s, derivation))
                if (const std::string *doc = document_of(leaf))
                    out.insert(*doc);
            return out;
        }

    private:
        std::vector<DocumentRecord> documents_;
        std::map<std::string, std::size_t> by_id_;
        std::map<ClauseId, std::string> owner_;
    };

} // namespace sa
