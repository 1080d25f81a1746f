#pragma once

// Readers for the line-oriented input formats:
//
//   knowledge base (.fol)   ~grStud(X) | pers(X).      stud(P) :- person(P), takesC(P,C).
//   query          (.q)     ?- person(P), takesCourse(P,C) answer P.
//   schema         (.map)   table takesCourse(student, course) as takesCourse/2.
//   data           (.tab)   takesCourse: s1, c1
//   documents      (.docs)  doc d1 { zoo:elephant(X) | zoo:elephant(X), pref(X, "http://z/"). }
//
// `%` starts a comment that runs to the end of the line.

#include "error.hpp"
#include "fact_store.hpp"
#include "term.hpp"

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sa
{

    struct DeductiveQuery
    {
        /// C | ~@(X1..Xk), where C is the negation of the user's conjunction.
        Clause goal;
        std::vector<VarId> distinguished;
        std::vector<VarId> undistinguished;
        std::vector<std::string> var_names; // indexed by VarId
        SymbolId answer_predicate = 0;

        std::string var_name(VarId v) const
        {
            return v < var_names.size() ? var_names[v] : default_var_name(v);
        }
    };

    struct DocumentSpec
    {
        std::string id;
        std::vector<Clause> clauses;
    };

    namespace detail
    {

        enum class Tok
        {
            Ident,  // lowercase-initial identifier or number
            Var,    // uppercase- or underscore-initial identifier
            String, // quoted
            Punct,
            End
        };

        struct Token
        {
            Tok kind;
            std::string text;
            std::size_t line;
            std::size_t column;
        };

        class Lexer
        {
        public:
            explicit Lexer(std::string_view text) : text_(text) { advance(); }

            const Token &peek() const { return current_; }

            Token next()
            {
                Token t = current_;
                advance();
                return t;
            }

            bool at_punct(std::string_view p) const { return current_.kind == Tok::Punct && current_.text == p; }
            bool at_ident(std::string_view word) const { return current_.kind == Tok::Ident && current_.text == word; }

            void expect(std::string_view p)
            {
                if (!at_punct(p))
                    fail("expected '" + std::string(p) + "'");
                advance();
            }

            [[noreturn]] void fail(const std::string &message) const
            {
                std::string found = current_.kind == Tok::End ? "end of input" : "'" + current_.text + "'";
                throw ParseError(message + ", found " + found, current_.line, current_.column);
            }

        private:
            static bool ident_char(char ch)
            {
                return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
            }

            char at(std::size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

            void bump()
            {
                if (text_[pos_] == '\n')
                {
                    ++line_;
                    column_ = 1;
                }
                else
                    ++column_;
                ++pos_;
            }

            void advance()
            {
                for (;;)
                {
                    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                        bump();
                    if (pos_ < text_.size() && text_[pos_] == '%')
                    {
                        while (pos_ < text_.size() && text_[pos_] != '\n')
                            bump();
                        continue;
                    }
                    break;
                }
                current_ = Token{Tok::End, "", line_, column_};
                if (pos_ >= text_.size())
                    return;
                char ch = text_[pos_];
                if (ident_char(ch))
                {
                    std::string word;
                    while (pos_ < text_.size())
                    {
                        char c = text_[pos_];
                        if (ident_char(c) || (c == ':' && ident_char(at(pos_ + 1)) && !word.empty()))
                        {
                            word += c;
                            bump();
                        }
                        else
                            break;
                    }
                    bool var = std::isupper(static_cast<unsigned char>(word[0])) || word[0] == '_';
                    current_.kind = var ? Tok::Var : Tok::Ident;
                    current_.text = std::move(word);
                    return;
                }
                if (ch == '\'' || ch == '"')
                {
                    char quote = ch;
                    bump();
                    std::string s;
                    for (;;)
                    {
                        if (pos_ >= text_.size())
                            throw ParseError("unterminated string", current_.line, current_.column);
                        char c = text_[pos_];
                        if (c == '\\' && pos_ + 1 < text_.size())
                        {
                            bump();
                            s += text_[pos_];
                            bump();
                            continue;
                        }
                        bump();
                        if (c == quote)
                            break;
                        s += c;
                    }
                    current_.kind = Tok::String;
                    current_.text = std::move(s);
                    return;
                }
                static const char *two[] = {"?-", ":-"};
                for (const char *p : two)
                {
                    if (text_.substr(pos_, 2) == p)
                    {
                        bump();
                        bump();
                        current_.kind = Tok::Punct;
                        current_.text = p;
                        return;
                    }
                }
                if (std::string_view("(),.|~/{}:").find(ch) != std::string_view::npos)
                {
                    bump();
                    current_.kind = Tok::Punct;
                    current_.text = std::string(1, ch);
                    return;
                }
                throw ParseError(std::string("unexpected character '") + ch + "'", line_, column_);
            }

            std::string_view text_;
            std::size_t pos_ = 0;
            std::size_t line_ = 1;
            std::size_t column_ = 1;
            Token current_{Tok::End, "", 1, 1};
        };

        /// Clause-local variable naming.
        struct VarScope
        {
            std::map<std::string, VarId> ids;
            std::vector<std::string> names;

            VarId get(const std::string &name)
            {
                if (name != "_")
                    if (auto it = ids.find(name); it != ids.end())
                        return it->second;
                auto id = static_cast<VarId>(names.size());
                names.push_back(name);
                if (name != "_")
                    ids.emplace(name, id);
                return id;
            }
        };

        class ClauseReader
        {
        public:
            ClauseReader(Lexer &lex, SymbolTable &symbols) : lex_(lex), symbols_(symbols) {}

            Term term(VarScope &scope)
            {
                Token t = lex_.peek();
                if (t.kind == Tok::Var)
                {
                    lex_.next();
                    return Term::var(scope.get(t.text));
                }
                if (t.kind == Tok::String)
                {
                    lex_.next();
                    return Term::app(symbols_.constant(t.text));
                }
                if (t.kind != Tok::Ident)
                    lex_.fail("expected a term");
                lex_.next();
                std::vector<Term> args;
                if (lex_.at_punct("("))
                {
                    lex_.next();
                    args.push_back(term(scope));
                    while (lex_.at_punct(","))
                    {
                        lex_.next();
                        args.push_back(term(scope));
                    }
                    lex_.expect(")");
                }
                try
                {
                    return Term::app(symbols_.function(t.text, args.size()), std::move(args));
                }
                catch (const ArityClash &e)
                {
                    throw ParseError(e.what(), t.line, t.column);
                }
            }

            Literal atom(VarScope &scope, PredicateKind kind = PredicateKind::Ordinary)
            {
                Token t = lex_.peek();
                if (t.kind != Tok::Ident || std::isdigit(static_cast<unsigned char>(t.text[0])))
                    lex_.fail("expected a predicate");
                lex_.next();
                std::vector<Term> args;
                if (lex_.at_punct("("))
                {
                    lex_.next();
                    args.push_back(term(scope));
                    while (lex_.at_punct(","))
                    {
                        lex_.next();
                        args.push_back(term(scope));
                    }
                    lex_.expect(")");
                }
                try
                {
                    SymbolId p = symbols_.predicate(t.text, args.size(), kind);
                    return Literal::pos(p, std::move(args));
                }
                catch (const ArityClash &e)
                {
                    throw ParseError(e.what(), t.line, t.column);
                }
            }

            Literal literal(VarScope &scope)
            {
                bool negative = false;
                while (lex_.at_punct("~"))
                {
                    lex_.next();
                    negative = !negative;
                }
                Literal l = atom(scope);
                l.positive = !negative;
                return l;
            }

        private:
            Lexer &lex_;
            SymbolTable &symbols_;
        };

        inline std::string trim(std::string_view s)
        {
            std::size_t b = 0, e = s.size();
            while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
                ++b;
            while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
                --e;
            return std::string(s.substr(b, e - b));
        }

    } // namespace detail

    /**
     * Reads a clausal knowledge base: one clause per `.`-terminated entry,
     * literals separated by `|`, negation `~`. `head :- b1, b2.` is accepted as
     * the clause head | ~b1 | ~b2. Recording parts are always empty.
     */
    inline std::vector<Clause> parse_kb(std::string_view text, SymbolTable &symbols)
    {
        detail::Lexer lex(text);
        detail::ClauseReader reader(lex, symbols);
        std::vector<Clause> out;
        while (lex.peek().kind != detail::Tok::End)
        {
            detail::VarScope scope;
            Clause c;
            c.origin.kind = OriginKind::Kb;
            if (!lex.at_punct(":-"))
            {
                c.literals.push_back(reader.literal(scope));
                while (lex.at_punct("|"))
                {
                    lex.next();
                    c.literals.push_back(reader.literal(scope));
                }
            }
            if (lex.at_punct(":-"))
            {
                lex.next();
                do
                {
                    if (lex.at_punct(","))
                        lex.next();
                    Literal body = reader.literal(scope);
                    body.positive = !body.positive;
                    c.literals.push_back(std::move(body));
                } while (lex.at_punct(","));
            }
            lex.expect(".");
            out.push_back(std::move(c));
        }
        return out;
    }

    /**
     * Reads `?- l1, ..., ln [answer V1, ..., Vk].`. The goal clause is
     * ~l1 | ... | ~ln with ~@(V1..Vk) as its only recording literal. Without an
     * answer list every variable is distinguished, in first-occurrence order.
     */
    inline DeductiveQuery parse_query(std::string_view text, SymbolTable &symbols)
    {
        detail::Lexer lex(text);
        detail::ClauseReader reader(lex, symbols);
        detail::VarScope scope;
        DeductiveQuery q;
        lex.expect("?-");
        if (lex.at_punct("."))
            lex.fail("empty query conjunction");
        std::vector<Literal> conjunction;
        conjunction.push_back(reader.literal(scope));
        while (lex.at_punct(","))
        {
            lex.next();
            conjunction.push_back(reader.literal(scope));
        }
        std::size_t vars_in_goal = scope.names.size();
        if (lex.at_ident("answer"))
        {
            lex.next();
            std::set<VarId> seen;
            for (;;)
            {
                detail::Token t = lex.peek();
                if (t.kind != detail::Tok::Var || t.text == "_")
                    lex.fail("expected an answer variable");
                auto it = scope.ids.find(t.text);
                if (it == scope.ids.end())
                    throw ParseError("answer variable " + t.text + " does not occur in the query", t.line,
                                     t.column);
                if (!seen.insert(it->second).second)
                    throw ParseError("answer variable " + t.text + " listed twice", t.line, t.column);
                q.distinguished.push_back(it->second);
                lex.next();
                if (!lex.at_punct(","))
                    break;
                lex.next();
            }
        }
        else
        {
            for (VarId v = 0; v < vars_in_goal; ++v)
                if (scope.names[v] != "_")
                    q.distinguished.push_back(v);
        }
        lex.expect(".");
        if (lex.peek().kind != detail::Tok::End)
            lex.fail("expected end of query");

        for (VarId v = 0; v < vars_in_goal; ++v)
            if (std::find(q.distinguished.begin(), q.distinguished.end(), v) == q.distinguished.end())
                q.undistinguished.push_back(v);

        for (Literal &l : conjunction)
        {
            l.positive = !l.positive;
            q.goal.literals.push_back(std::move(l));
        }
        q.answer_predicate = symbols.answer_predicate(q.distinguished.size());
        std::vector<Term> answer_args;
        for (VarId v : q.distinguished)
            answer_args.push_back(Term::var(v));
        q.goal.recording.push_back(Literal::neg(q.answer_predicate, std::move(answer_args)));
        q.goal.origin.kind = OriginKind::Goal;
        q.var_names = scope.names;
        return q;
    }

    /// Reads `table <name>(<col>, ...) as <predicate>/<arity>.` entries.
    inline Schema parse_schema(std::string_view text, SymbolTable &symbols)
    {
        detail::Lexer lex(text);
        Schema schema;
        while (lex.peek().kind != detail::Tok::End)
        {
            if (!lex.at_ident("table"))
                lex.fail("expected 'table'");
            lex.next();
            detail::Token name = lex.next();
            if (name.kind != detail::Tok::Ident)
                throw ParseError("expected a table name", name.line, name.column);
            Table table;
            table.name = name.text;
            lex.expect("(");
            for (;;)
            {
                detail::Token col = lex.next();
                if (col.kind != detail::Tok::Ident && col.kind != detail::Tok::Var)
                    throw ParseError("expected a column name", col.line, col.column);
                table.columns.push_back(col.text);
                if (!lex.at_punct(","))
                    break;
                lex.next();
            }
            lex.expect(")");
            if (!lex.at_ident("as"))
                lex.fail("expected 'as'");
            lex.next();
            detail::Token pred = lex.next();
            if (pred.kind != detail::Tok::Ident)
                throw ParseError("expected a predicate name", pred.line, pred.column);
            lex.expect("/");
            detail::Token arity = lex.next();
            if (arity.kind != detail::Tok::Ident ||
                !std::all_of(arity.text.begin(), arity.text.end(), [](unsigned char c)
                             { return std::isdigit(c); }))
                throw ParseError("expected an arity", arity.line, arity.column);
            std::size_t n = std::stoul(arity.text);
            if (n != table.columns.size())
                throw ParseError("arity mismatch: table " + table.name + " has " +
                                     std::to_string(table.columns.size()) + " columns but predicate " + pred.text +
                                     " is declared with arity " + std::to_string(n),
                                 arity.line, arity.column);
            lex.expect(".");
            try
            {
                table.predicate = symbols.predicate(pred.text, n, PredicateKind::Database);
                schema.add_table(std::move(table));
            }
            catch (const Error &e)
            {
                throw ParseError(e.what(), name.line, name.column);
            }
        }
        return schema;
    }

    /**
     * Reads data rows `<table>: v1, v2, ...`, one per line. Values are constants
     * (bare words keep their spelling, quoted values may contain any character
     * and write their own quote character twice).
     */
    inline FactStore load_facts(const Schema &schema, std::string_view text, SymbolTable &symbols)
    {
        FactStore store;
        // Tables without rows still exist as empty relations.
        std::size_t line_no = 0;
        std::size_t start = 0;
        while (start <= text.size())
        {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos)
                end = text.size();
            std::string_view line = text.substr(start, end - start);
            start = end + 1;
            ++line_no;

            // strip comments outside quotes
            std::string content;
            char quote = 0;
            for (char ch : line)
            {
                if (quote)
                {
                    if (ch == quote)
                        quote = 0;
                }
                else if (ch == '\'' || ch == '"')
                    quote = ch;
                else if (ch == '%')
                    break;
                content += ch;
            }
            std::string trimmed = detail::trim(content);
            if (trimmed.empty())
                continue;
            std::size_t colon = trimmed.find(':');
            if (colon == std::string::npos)
                throw ParseError("expected '<table>: values'", line_no, 1);
            std::string table_name = detail::trim(std::string_view(trimmed).substr(0, colon));
            const Table *table = schema.find_table(table_name);
            if (!table)
                throw ParseError("unknown table " + table_name, line_no, 1);

            std::string rest = trimmed.substr(colon + 1);
            if (!rest.empty() && rest.back() == '.')
                rest.pop_back();
            std::vector<std::string> values;
            std::string current;
            bool quoted = false;
            quote = 0;
            for (std::size_t i = 0; i < rest.size(); ++i)
            {
                char ch = rest[i];
                if (quote)
                {
                    if (ch == quote && i + 1 < rest.size() && rest[i + 1] == quote)
                        current += rest[++i]; // doubled quote stands for itself
                    else if (ch == quote)
                        quote = 0;
                    else
                        current += ch;
                    continue;
                }
                if (ch == '\'' || ch == '"')
                {
                    if (quoted || !detail::trim(current).empty())
                        throw ParseError("quote inside a bare value", line_no, colon + 2);
                    current.clear();
                    quote = ch;
                    quoted = true;
                    continue;
                }
                if (ch == ',')
                {
                    values.push_back(quoted ? current : detail::trim(current));
                    current.clear();
                    quoted = false;
                    continue;
                }
                if (ch == '(' || ch == ')')
                    throw ParseError("compound term in data for table " + table_name, line_no, colon + 2);
                if (quoted && !std::isspace(static_cast<unsigned char>(ch)))
                    throw ParseError("characters after a quoted value", line_no, colon + 2);
                current += ch;
            }
            if (quote)
                throw ParseError("unterminated quoted value", line_no, colon + 2);
            values.push_back(quoted ? current : detail::trim(current));
            for (const std::string &v : values)
                if (v.empty())
                    throw ParseError("empty value in row for table " + table_name, line_no, colon + 2);
            if (values.size() != table->columns.size())
                throw ParseError("arity mismatch: table " + table_name + " has " +
                                     std::to_string(table->columns.size()) + " columns, row has " +
                                     std::to_string(values.size()),
                                 line_no, 1);
            Tuple tuple;
            for (const std::string &v : values)
                tuple.push_back(symbols.constant(v));
            store.insert(table->predicate, std::move(tuple));
        }
        return store;
    }

    /**
     * Reads a document registry: `doc <id> { <clause>. ... }` where each clause is
     * `p(...)` or `p(...) | p(...)`, optionally followed by `, pref(Var, "prefix")`
     * constraints. Every clause becomes the abstraction clause p(...) | p(...).
     */
    inline std::vector<DocumentSpec> parse_documents(std::string_view text, SymbolTable &symbols)
    {
        detail::Lexer lex(text);
        detail::ClauseReader reader(lex, symbols);
        std::vector<DocumentSpec> out;
        while (lex.peek().kind != detail::Tok::End)
        {
            if (!lex.at_ident("doc"))
                lex.fail("expected 'doc'");
            lex.next();
            detail::Token id = lex.next();
            if (id.kind == detail::Tok::End || id.kind == detail::Tok::Punct)
                throw ParseError("expected a document id", id.line, id.column);
            DocumentSpec doc;
            doc.id = id.text;
            lex.expect("{");
            while (!lex.at_punct("}"))
            {
                detail::VarScope scope;
                detail::Token at = lex.peek();
                Literal atom = reader.atom(scope, PredicateKind::Database);
                if (lex.at_punct("|"))
                {
                    lex.next();
                    Literal again = reader.atom(scope, PredicateKind::Database);
                    if (!again.same_atom(atom))
                        throw ParseError("abstraction clause must have identical sides", at.line, at.column);
                }
                Clause c = make_abstraction(atom.pred, atom.args);
                c.origin.document = doc.id;
                while (lex.at_punct(","))
                {
                    lex.next();
                    if (!lex.at_ident("pref"))
                        lex.fail("expected pref(Var, \"prefix\")");
                    lex.next();
                    lex.expect("(");
                    detail::Token v = lex.next();
                    if (v.kind != detail::Tok::Var)
                        throw ParseError("pref constraint needs a variable", v.line, v.column);
                    auto it = scope.ids.find(v.text);
                    if (it == scope.ids.end())
                        throw ParseError("pref variable " + v.text + " does not occur in the clause", v.line,
                                         v.column);
                    lex.expect(",");
                    detail::Token prefix = lex.next();
                    if (prefix.kind != detail::Tok::String)
                        throw ParseError("pref prefix must be a quoted string", prefix.line, prefix.column);
                    lex.expect(")");
                    c.prefixes.push_back({Term::var(it->second), prefix.text});
                }
                lex.expect(".");
                doc.clauses.push_back(std::move(c));
            }
            lex.expect("}");
            out.push_back(std::move(doc));
        }
        return out;
    }

} // namespace sa
