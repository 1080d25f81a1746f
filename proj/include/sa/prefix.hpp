#pragma once

#include "term.hpp"

#include <map>
#include <string>
#include <vector>

namespace sa
{

    inline bool is_string_prefix(const std::string &prefix, const std::string &s)
    {
        return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
    }

    /**
     * Prefix constraints are compatible iff, for every variable, its prefixes
     * form a chain under the string-prefix relation. A constraint on a constant
     * additionally requires the constant's spelling to carry the prefix (only
     * checked when `symbols` is given). Constraints on compound terms are ignored.
     */
    inline bool pref_compatible(const std::vector<PrefixConstraint> &constraints,
                                const SymbolTable *symbols = nullptr)
    {
        std::map<VarId, std::vector<const std::string *>> by_var;
        for (const PrefixConstraint &c : constraints)
        {
            if (c.term.is_var())
                by_var[c.term.var_id()].push_back(&c.prefix);
            else if (c.term.is_constant() && symbols &&
                     !is_string_prefix(c.prefix, symbols->func(c.term.functor()).name))
                return false;
        }
        for (const auto &[_, prefixes] : by_var)
            for (std::size_t i = 0; i < prefixes.size(); ++i)
                for (std::size_t j = i + 1; j < prefixes.size(); ++j)
                    if (!is_string_prefix(*prefixes[i], *prefixes[j]) &&
                        !is_string_prefix(*prefixes[j], *prefixes[i]))
                        return false;
        return true;
    }

} // namespace sa
