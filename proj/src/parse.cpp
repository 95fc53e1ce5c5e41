#include "cfl/parse.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "cfl/errors.hpp"
#include "cfl/graph.hpp"
#include "cfl/transform.hpp"

namespace cfl {

namespace {

enum class Tok { ident, number, coloncolon, arrow, comma, semicolon, dot, lparen, rparen,
                 naf, end };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

class Scanner {
public:
    explicit Scanner(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(tok_.line, tok_.col, msg);
    }

private:
    void advance() {
        skip_space();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= text_.size()) {
            tok_ = {Tok::end, "", line_, col_};
            return;
        }
        char c = text_[pos_];
        if (std::islower(static_cast<unsigned char>(c))) {
            std::string s;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                s.push_back(text_[pos_]), bump();
            tok_ = {Tok::ident, s, tok_.line, tok_.col};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string s;
            while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                           text_[pos_] == '.' || text_[pos_] == '/')) {
                // A '.' is part of the number only when a digit follows;
                // otherwise it terminates the statement.
                if (text_[pos_] == '.' &&
                    (pos_ + 1 >= text_.size() ||
                     !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))))
                    break;
                s.push_back(text_[pos_]), bump();
            }
            tok_ = {Tok::number, s, tok_.line, tok_.col};
            return;
        }
        switch (c) {
            case ':':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == ':') {
                    bump(); bump();
                    tok_ = {Tok::coloncolon, "::", tok_.line, tok_.col};
                    return;
                }
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
                    bump(); bump();
                    tok_ = {Tok::arrow, ":-", tok_.line, tok_.col};
                    return;
                }
                throw parse_error(line_, col_, "stray ':'");
            case ',': bump(); tok_ = {Tok::comma, ",", tok_.line, tok_.col}; return;
            case ';': bump(); tok_ = {Tok::semicolon, ";", tok_.line, tok_.col}; return;
            case '.': bump(); tok_ = {Tok::dot, ".", tok_.line, tok_.col}; return;
            case '(': bump(); tok_ = {Tok::lparen, "(", tok_.line, tok_.col}; return;
            case ')': bump(); tok_ = {Tok::rparen, ")", tok_.line, tok_.col}; return;
            case '\\':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '+') {
                    bump(); bump();
                    tok_ = {Tok::naf, "\\+", tok_.line, tok_.col};
                    return;
                }
                throw parse_error(line_, col_, "stray '\\'");
            default:
                throw parse_error(line_, col_, std::string("unexpected character '") + c + "'");
        }
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') bump();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

bool is_reserved_functor(const std::string& s) {
    return s == "query" || s == "evidence" || s == "fix" || s == "do";
}

struct RawFact {
    Atom atom;
    Prob prob;
};
struct RawClause {
    Atom head;
    std::vector<Literal> body;
};
struct RawItem {
    enum Kind { fact, clause, ad } kind;
    std::size_t index;
};

class Parser {
public:
    Parser(const std::string& text, const ParseOptions& opts) : sc_(text), opts_(opts) {}

    ParseResult run() {
        while (sc_.peek().kind != Tok::end) statement();
        return assemble();
    }

private:
    Token expect(Tok kind, const std::string& what) {
        if (sc_.peek().kind != kind) sc_.fail("expected " + what);
        return sc_.take();
    }

    Atom atom() {
        Token name = expect(Tok::ident, "atom");
        if (is_reserved_functor(name.text))
            throw parse_error(name.line, name.col,
                              "'" + name.text + "' is reserved for directives");
        std::string full = name.text;
        if (sc_.peek().kind == Tok::lparen) {
            sc_.take();
            full.push_back('(');
            full += expect(Tok::ident, "argument").text;
            while (sc_.peek().kind == Tok::comma) {
                sc_.take();
                full.push_back(',');
                full += expect(Tok::ident, "argument").text;
            }
            expect(Tok::rparen, "')'");
            full.push_back(')');
        }
        return Atom::intern(full);
    }

    Prob probability() {
        Token t = expect(Tok::number, "probability");
        auto p = parse_prob(t.text);
        if (!p) throw parse_error(t.line, t.col, "malformed probability '" + t.text + "'");
        if (p->value < 0.0 || p->value > 1.0)
            throw parse_error(t.line, t.col, "probability '" + t.text + "' outside [0,1]");
        return *p;
    }

    Literal literal() {
        if (sc_.peek().kind == Tok::naf) {
            sc_.take();
            return neg(atom());
        }
        return pos(atom());
    }

    std::vector<Literal> body() {
        std::vector<Literal> out{literal()};
        while (sc_.peek().kind == Tok::comma) {
            sc_.take();
            out.push_back(literal());
        }
        return out;
    }

    bool boolean() {
        Token t = expect(Tok::ident, "'true' or 'false'");
        if (t.text == "true") return true;
        if (t.text == "false") return false;
        throw parse_error(t.line, t.col, "expected 'true' or 'false'");
    }

    void directive(const std::string& which) {
        expect(Tok::lparen, "'('");
        Atom a = atom();
        if (which == "query") {
            dirs_.queries.push_back(a);
        } else {
            expect(Tok::comma, "','");
            bool v = boolean();
            if (which == "evidence") dirs_.evidence.emplace_back(a, v);
            else if (which == "fix") dirs_.fixes.emplace_back(a, v);
            else dirs_.dos.emplace_back(a, v);
        }
        expect(Tok::rparen, "')'");
        expect(Tok::dot, "'.'");
    }

    void statement() {
        const Token& t = sc_.peek();
        if (t.kind == Tok::ident && is_reserved_functor(t.text)) {
            directive(sc_.take().text);
            return;
        }
        if (t.kind == Tok::number) {
            Prob p = probability();
            expect(Tok::coloncolon, "'::'");
            Atom head = atom();
            if (sc_.peek().kind == Tok::dot) {
                sc_.take();
                push_fact(head, p);
                return;
            }
            // Annotated disjunction / probabilistic clause.
            LPADClause rc;
            rc.heads.push_back({head, p});
            while (sc_.peek().kind == Tok::semicolon) {
                sc_.take();
                Prob pi = probability();
                expect(Tok::coloncolon, "'::'");
                rc.heads.push_back({atom(), pi});
            }
            if (sc_.peek().kind == Tok::arrow) {
                sc_.take();
                rc.body = body();
            }
            expect(Tok::dot, "'.'");
            items_.push_back({RawItem::ad, ads_.size()});
            ads_.push_back(std::move(rc));
            return;
        }
        Atom head = atom();
        if (sc_.peek().kind == Tok::dot) {
            sc_.take();
            push_fact(head, Prob::one());  // bare atom: deterministic fact
            return;
        }
        expect(Tok::arrow, "':-' or '.'");
        std::vector<Literal> b = body();
        expect(Tok::dot, "'.'");
        items_.push_back({RawItem::clause, raw_clauses_.size()});
        raw_clauses_.push_back({head, std::move(b)});
    }

    void push_fact(Atom a, Prob p) {
        items_.push_back({RawItem::fact, raw_facts_.size()});
        raw_facts_.push_back({a, std::move(p)});
    }

    ParseResult assemble() {
        AtomSet used;
        auto note = [&](Atom a) { used.insert(a); };
        for (const auto& f : raw_facts_) note(f.atom);
        for (const auto& c : raw_clauses_) {
            note(c.head);
            for (const auto& l : c.body) note(l.atom);
        }
        for (const auto& rc : ads_) {
            for (const auto& h : rc.heads) note(h.atom);
            for (const auto& l : rc.body) note(l.atom);
        }

        ParseResult out;
        out.directives = dirs_;
        std::size_t ad_counter = 0;
        for (const auto& item : items_) {
            switch (item.kind) {
                case RawItem::fact:
                    out.program.push_fact(raw_facts_[item.index].atom,
                                          raw_facts_[item.index].prob);
                    break;
                case RawItem::clause:
                    out.program.push_clause(raw_clauses_[item.index].head,
                                            raw_clauses_[item.index].body);
                    break;
                case RawItem::ad: {
                    LPADProgram one;
                    one.clauses.push_back(ads_[item.index]);
                    one.validate();
                    append_desugared_ad(out.program, ads_[item.index], ad_counter++, used);
                    break;
                }
            }
        }

        out.program.validate();

        // Atoms used only in bodies are typos more often than intent.
        AtomSet declared = out.program.fact_atoms();
        for (Atom h : out.program.head_atoms()) declared.insert(h);
        std::vector<Atom> undeclared;
        for (const auto& c : out.program.clauses)
            for (const auto& l : c.body)
                if (!declared.count(l.atom)) {
                    declared.insert(l.atom);
                    undeclared.push_back(l.atom);
                }
        if (!undeclared.empty()) {
            if (!opts_.implicit_false) {
                std::sort(undeclared.begin(), undeclared.end());
                throw validation_error("atom '" + undeclared.front().name() +
                                       "' is used in a body but never declared "
                                       "(use implicit-false to default it to 0.0)");
            }
            std::sort(undeclared.begin(), undeclared.end());
            for (Atom a : undeclared) out.program.push_fact(a, Prob::zero());
        }

        auto acyc = check_acyclic(out.program);
        if (!acyc.ok) {
            std::ostringstream os;
            os << "dependency cycle:";
            for (Atom a : acyc.cycle) os << " " << a.name();
            throw validation_error(os.str());
        }
        return out;
    }

    Scanner sc_;
    ParseOptions opts_;
    Directives dirs_;
    std::vector<RawFact> raw_facts_;
    std::vector<RawClause> raw_clauses_;
    std::vector<LPADClause> ads_;
    std::vector<RawItem> items_;
};

}  // namespace

ParseResult parse_with_directives(const std::string& text, const ParseOptions& opts) {
    return Parser(text, opts).run();
}

Program parse_program(const std::string& text, const ParseOptions& opts) {
    return parse_with_directives(text, opts).program;
}

std::string print_program(const Program& p) {
    std::ostringstream os;
    for (const auto& item : p.source_order) {
        if (item.kind == Program::ItemKind::fact) {
            const ProbFact& f = p.facts[item.index];
            os << to_string(f.prob) << "::" << f.atom.name() << ".\n";
        } else {
            const Clause& c = p.clauses[item.index];
            os << c.head.name() << " :- ";
            for (std::size_t i = 0; i < c.body.size(); ++i) {
                if (i) os << ", ";
                os << to_string(c.body[i]);
            }
            os << ".\n";
        }
    }
    return os.str();
}

std::string print_directives(const Directives& d) {
    std::ostringstream os;
    for (Atom a : d.queries) os << "query(" << a.name() << ").\n";
    for (const auto& [a, v] : d.evidence)
        os << "evidence(" << a.name() << ", " << (v ? "true" : "false") << ").\n";
    for (const auto& [a, v] : d.fixes)
        os << "fix(" << a.name() << ", " << (v ? "true" : "false") << ").\n";
    for (const auto& [a, v] : d.dos)
        os << "do(" << a.name() << ", " << (v ? "true" : "false") << ").\n";
    return os.str();
}

}  // namespace cfl
