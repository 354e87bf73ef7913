#ifndef ULTRASHIFT_IO_HPP
#define ULTRASHIFT_IO_HPP

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ultrashift/emitters.hpp"
#include "ultrashift/path.hpp"

namespace ultrashift {

namespace io {

struct Token {
    enum class Kind { Ident, Number, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    int line = 1;
    int column = 1;
};

/// Thrown inside the parser; converted to a Diagnostic at the API boundary.
struct ParseFailure {
    Diagnostic diag;
};

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    static const char* twoChar[] = {"=>", "==", ">=", "<=", "!="};
    while (i < src.size()) {
        unsigned char c = static_cast<unsigned char>(src[i]);
        if (std::isspace(c)) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = Token::Kind::Ident;
            t.text = src.substr(i, j - i);
            advance(j - i);
        } else if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Token::Kind::Number;
            t.text = src.substr(i, j - i);
            advance(j - i);
        } else {
            t.kind = Token::Kind::Punct;
            t.text = std::string(1, static_cast<char>(c));
            for (const char* two : twoChar)
                if (src.compare(i, 2, two) == 0) t.text = two;
            if (std::string("{}()[];,:+-*%=<>|@&.~!/^").find(static_cast<char>(c)) == std::string::npos)
                throw ParseFailure{{codes::kSyntax, std::string("unexpected character '") + static_cast<char>(c) + "'",
                                    line, col}};
            advance(t.text.size());
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

/// Signed linear form a*var + b.
struct Linear {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::string var;
};

class Cursor {
public:
    explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    bool atEnd() const { return peek().kind == Token::Kind::End; }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool is(const std::string& text) const {
        const Token& t = peek();
        return t.kind != Token::Kind::End && t.kind != Token::Kind::Number && t.text == text;
    }
    bool accept(const std::string& text) {
        if (!is(text)) return false;
        next();
        return true;
    }
    [[noreturn]] void fail(const std::string& code, const std::string& msg, const Token& at) const {
        throw ParseFailure{{code, msg, at.line, at.column}};
    }
    [[noreturn]] void fail(const std::string& msg) const { fail(codes::kSyntax, msg, peek()); }
    const Token& expect(const std::string& text) {
        if (!is(text)) fail("expected '" + text + "' but found " + describe(peek()));
        return next();
    }
    std::string ident() {
        if (peek().kind != Token::Kind::Ident) fail("expected a name but found " + describe(peek()));
        return next().text;
    }
    Index number() {
        if (peek().kind != Token::Kind::Number) fail("expected a number but found " + describe(peek()));
        const Token& t = next();
        try {
            return std::stoull(t.text);
        } catch (const std::exception&) {
            fail(codes::kSyntax, "number out of range", t);
        }
    }
    static std::string describe(const Token& t) {
        if (t.kind == Token::Kind::End) return "end of input";
        return "'" + t.text + "'";
    }

    /// term := NUMBER ['*'] [VAR] | VAR, joined by + and -.
    Linear linear(const std::vector<std::string>& allowed) {
        Linear out;
        bool first = true;
        while (true) {
            int sign = 1;
            if (accept("-")) sign = -1;
            else if (!first && !accept("+")) break;
            else if (first) accept("+");
            first = false;
            const Token& at = peek();
            std::int64_t coef = 1;
            bool hasNumber = false;
            if (peek().kind == Token::Kind::Number) {
                coef = static_cast<std::int64_t>(number());
                hasNumber = true;
                accept("*");
            }
            if (peek().kind == Token::Kind::Ident && !isKeyword(peek().text)) {
                const Token& vt = next();
                if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), vt.text) == allowed.end())
                    fail(codes::kNonAffine, "unknown index variable '" + vt.text + "'", vt);
                if (!out.var.empty() && out.var != vt.text)
                    fail(codes::kNonAffine, "index rule mixes variables '" + out.var + "' and '" + vt.text + "'", vt);
                out.var = vt.text;
                out.a += sign * coef;
            } else if (hasNumber) {
                out.b += sign * coef;
            } else {
                fail("expected an index expression at " + describe(at));
            }
            if (is("*") || is("^") || is("/") || is("("))
                fail(codes::kNonAffine, "index rules must be affine (a*k+b)", peek());
            if (!is("+") && !is("-")) break;
        }
        return out;
    }

    Affine affine(const std::vector<std::string>& allowed, std::string* var = nullptr) {
        const Token& at = peek();
        Linear l = linear(allowed);
        if (l.a < 0) fail(codes::kNonAffine, "index rules need a non-negative coefficient", at);
        if (var) *var = l.var;
        return Affine{static_cast<Index>(l.a), l.b};
    }

    /// iset := conj ('or' conj)*; conj := prim ('and' prim)*.
    IndexSet indexSet(const std::string& var) {
        IndexSet s = conj(var);
        while (accept("or")) s = s.unite(conj(var));
        return s;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    static bool isKeyword(const std::string& s) { return s == "and" || s == "or" || s == "in"; }

    IndexSet conj(const std::string& var) {
        IndexSet s = prim(var);
        while (accept("and")) s = s.intersect(prim(var));
        return s;
    }

    IndexSet prim(const std::string& var) {
        if (accept("all")) return IndexSet::all();
        if (accept("none")) return IndexSet::empty();
        if (accept("(")) {
            IndexSet s = indexSet(var);
            expect(")");
            return s;
        }
        const Token& vt = peek();
        std::string name = ident();
        if (name != var) fail(codes::kSyntax, "guard must constrain '" + var + "', not '" + name + "'", vt);
        if (accept("in")) {
            expect("{");
            std::vector<Index> members;
            if (!is("}")) {
                members.push_back(number());
                while (accept(",")) members.push_back(number());
            }
            expect("}");
            return IndexSet::finite(std::move(members));
        }
        if (accept("%")) {
            const Token& mt = peek();
            Index m = number();
            if (m == 0) fail(codes::kSyntax, "modulus must be positive", mt);
            if (m > kMaxPeriod) fail(codes::kPeriod, "modulus exceeds the supported period", mt);
            expect("==");
            Index r = number();
            if (r >= m) fail(codes::kSyntax, "residue must be below the modulus", mt);
            return IndexSet::progression(0, m, r);
        }
        const Token& op = peek();
        std::string o = op.text;
        if (o != "==" && o != ">=" && o != "<=" && o != ">" && o != "<" && o != "!=")
            fail("expected a comparison after '" + var + "'");
        next();
        Index n = number();
        if (o == "==") return IndexSet::singleton(n);
        if (o == "!=") return IndexSet::singleton(n).complement();
        if (o == ">=") return IndexSet::atLeast(n);
        if (o == ">") return IndexSet::atLeast(n + 1);
        if (o == "<") return IndexSet::interval(0, n);
        return IndexSet::interval(0, n + 1);
    }
};

inline Diagnostic failureAt(const std::string& code, const std::string& msg, int line, int col) {
    return {code, msg, line, col};
}

}  // namespace io

/// Guard syntax for an index set over `var`; parses back to the same set.
inline std::string indexSetExpr(const IndexSet& s, const std::string& var) {
    if (s.isEmpty()) return "none";
    if (s == IndexSet::all()) return "all";
    std::vector<std::string> parts;
    auto explicitPart = s.membersIn(0, s.threshold());
    if (!explicitPart.empty()) {
        std::string e = var + " in {";
        for (std::size_t i = 0; i < explicitPart.size(); ++i) e += (i ? "," : "") + std::to_string(explicitPart[i]);
        parts.push_back(e + "}");
    }
    for (Index r : s.residues()) {
        std::string tail = var + " >= " + std::to_string(s.threshold());
        if (s.period() > 1) tail = "(" + tail + " and " + var + " % " + std::to_string(s.period()) + " == " +
                                   std::to_string(r) + ")";
        parts.push_back(tail);
    }
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " or " : "") + parts[i];
    return out;
}

/// Set-literal syntax for a vertex set: `{u[1],u[3]}` or comprehensions joined by '+'.
inline std::string vertexSetExpr(const VertexSet& s) {
    if (s.isEmpty()) return "{}";
    std::vector<std::string> terms;
    for (const auto& [fam, idx] : s.atoms()) {
        if (idx.isFinite()) {
            std::string t = "{";
            auto ms = idx.membersIn(0, idx.threshold());
            for (std::size_t i = 0; i < ms.size(); ++i) t += (i ? "," : "") + fam + "[" + std::to_string(ms[i]) + "]";
            terms.push_back(t + "}");
        } else {
            terms.push_back("{" + fam + "[j] : " + indexSetExpr(idx, "j") + "}");
        }
    }
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) out += (i ? " + " : "") + terms[i];
    return out;
}

inline std::string linearExpr(std::int64_t a, std::int64_t b, const std::string& var) {
    std::string out;
    if (a != 0) {
        if (a == -1) out = "-";
        else if (a != 1) out = std::to_string(a) + "*";
        out += var;
        if (b > 0) out += "+" + std::to_string(b);
        if (b < 0) out += "-" + std::to_string(-b);
        return out;
    }
    return std::to_string(b);
}

/// Presentation text that parses back to an equal ultragraph.
inline std::string serializeUltragraph(const Ultragraph& g) {
    std::ostringstream os;
    for (const auto& vf : g.vertexFamilies()) {
        if (vf.domain == IndexSet::all()) os << "vertexfamily " << vf.name << ";\n";
        else os << "vertexfamily " << vf.name << "(n) { domain " << indexSetExpr(vf.domain, "n") << "; }\n";
    }
    for (const auto& f : g.edgeFamilies()) {
        os << "edgefamily " << f.name << "(" << f.var << ") {\n";
        os << "  domain " << indexSetExpr(f.domain, f.var) << ";\n";
        os << "  source " << f.sourceFamily << "[" << f.source.str(f.var) << "];\n";
        for (const auto& c : f.clauses) {
            os << "  range " << indexSetExpr(c.guard, f.var) << " => ";
            // consecutive singletons share one brace list; atom order is kept
            std::vector<std::string> singles, terms;
            auto flush = [&] {
                if (singles.empty()) return;
                std::string t = "{ ";
                for (std::size_t i = 0; i < singles.size(); ++i) t += (i ? ", " : "") + singles[i];
                terms.push_back(t + " }");
                singles.clear();
            };
            for (const auto& a : c.atoms) {
                if (a.kind == RangeAtom::Kind::Singleton) {
                    singles.push_back(a.family + "[" + a.index.str(f.var) + "]");
                } else {
                    flush();
                    std::string b = a.binder.empty() || a.binder == f.var ? "j" : a.binder;
                    terms.push_back("{ " + a.family + "[" + a.index.str(b) + "] : " + indexSetExpr(a.guard, b) + " }");
                }
            }
            flush();
            for (std::size_t i = 0; i < terms.size(); ++i) os << (i ? " + " : "") << terms[i];
            os << ";\n";
        }
        os << "}\n";
    }
    if (g.gradingHint())
        for (const auto& [fam, lf] : *g.gradingHint())
            os << "grading " << fam << " = " << linearExpr(lf.slope, lf.offset, "n") << ";\n";
    return os.str();
}

namespace io {

struct DocumentParser {
    Cursor cur;
    std::vector<VertexFamily> vertices;
    std::vector<EdgeFamily> edges;
    Grading grading;
    bool hasGrading = false;
    std::map<std::string, std::pair<int, int>> where;

    explicit DocumentParser(const std::string& text) : cur(lex(text)) {}

    void run() {
        while (!cur.atEnd()) {
            const Token& t = cur.peek();
            if (cur.accept("vertexfamily")) vertexFamily(t);
            else if (cur.accept("edgefamily")) edgeFamily(t);
            else if (cur.accept("grading")) gradingDecl();
            else cur.fail("expected a declaration but found " + Cursor::describe(t));
        }
    }

    void vertexFamily(const Token& kw) {
        const Token& nt = cur.peek();
        VertexFamily vf;
        vf.name = cur.ident();
        where.emplace(vf.name, std::make_pair(nt.line, nt.column));
        if (cur.accept("(")) {
            std::string var = cur.ident();
            cur.expect(")");
            cur.expect("{");
            cur.expect("domain");
            vf.domain = cur.indexSet(var);
            cur.expect(";");
            cur.expect("}");
            cur.accept(";");
        } else {
            cur.expect(";");
        }
        (void)kw;
        vertices.push_back(std::move(vf));
    }

    std::vector<RangeAtom> rangeBody(const std::string& var) {
        std::vector<RangeAtom> atoms;
        do {
            if (cur.accept("{")) {
                const Token& ft = cur.peek();
                std::string fam = cur.ident();
                cur.expect("[");
                std::string used;
                Affine idx = cur.affine({}, &used);
                cur.expect("]");
                if (cur.accept(":")) {
                    RangeAtom a;
                    a.kind = RangeAtom::Kind::Comprehension;
                    a.family = fam;
                    a.index = idx;
                    a.binder = used.empty() ? "j" : used;
                    if (a.binder == var)
                        cur.fail(codes::kSyntax, "comprehension variable must differ from '" + var + "'", ft);
                    a.guard = cur.indexSet(a.binder);
                    cur.expect("}");
                    atoms.push_back(std::move(a));
                    continue;
                }
                auto single = [&](const std::string& family, Affine ix, const std::string& v, const Token& at) {
                    if (!v.empty() && v != var)
                        cur.fail(codes::kNonAffine, "unknown index variable '" + v + "'", at);
                    RangeAtom a;
                    a.family = family;
                    a.index = ix;
                    atoms.push_back(std::move(a));
                };
                single(fam, idx, used, ft);
                while (cur.accept(",")) {
                    const Token& at = cur.peek();
                    std::string f2 = cur.ident();
                    cur.expect("[");
                    std::string u2;
                    Affine i2 = cur.affine({}, &u2);
                    cur.expect("]");
                    single(f2, i2, u2, at);
                }
                cur.expect("}");
            } else {
                const Token& at = cur.peek();
                std::string fam = cur.ident();
                cur.expect("[");
                std::string used;
                Affine idx = cur.affine({var}, &used);
                cur.expect("]");
                (void)at;
                RangeAtom a;
                a.family = fam;
                a.index = idx;
                atoms.push_back(std::move(a));
            }
        } while (cur.accept("+"));
        return atoms;
    }

    void edgeFamily(const Token&) {
        const Token& nt = cur.peek();
        EdgeFamily f;
        f.name = cur.ident();
        where.emplace(f.name, std::make_pair(nt.line, nt.column));
        cur.expect("(");
        f.var = cur.ident();
        cur.expect(")");
        cur.expect("{");
        bool haveSource = false;
        while (!cur.accept("}")) {
            if (cur.accept("domain")) {
                f.domain = cur.indexSet(f.var);
                cur.expect(";");
            } else if (cur.accept("source")) {
                f.sourceFamily = cur.ident();
                cur.expect("[");
                f.source = cur.affine({f.var});
                cur.expect("]");
                cur.expect(";");
                haveSource = true;
            } else if (cur.accept("range")) {
                RangeClause c;
                if (cur.is("{")) {
                    c.guard = IndexSet::all();
                } else {
                    c.guard = cur.indexSet(f.var);
                    cur.expect("=>");
                }
                c.atoms = rangeBody(f.var);
                cur.expect(";");
                f.clauses.push_back(std::move(c));
            } else {
                cur.fail("expected 'domain', 'source' or 'range' but found " + Cursor::describe(cur.peek()));
            }
        }
        cur.accept(";");
        if (!haveSource) cur.fail(codes::kSyntax, "edge family '" + f.name + "' has no source rule", nt);
        if (f.clauses.empty()) cur.fail(codes::kEmptyRange, "edge family '" + f.name + "' has no range rule", nt);
        edges.push_back(std::move(f));
    }

    void gradingDecl() {
        std::string fam = cur.ident();
        cur.expect("=");
        Linear l = cur.linear({});
        cur.expect(";");
        grading[fam] = {l.a, l.b};
        hasGrading = true;
    }
};

}  // namespace io

/// Parses and validates a presentation. Diagnostics carry line and column.
inline Parsed<Ultragraph> parseUltragraph(const std::string& text) {
    Parsed<Ultragraph> out;
    std::optional<io::DocumentParser> parser;
    try {
        parser.emplace(text);
        parser->run();
    } catch (const io::ParseFailure& f) {
        out.diagnostics.push_back(f.diag);
        return out;
    } catch (const PeriodOverflow& e) {
        out.diagnostics.push_back({codes::kPeriod, e.what(), 1, 1});
        return out;
    }
    io::DocumentParser& p = *parser;
    std::optional<Grading> gr;
    if (p.hasGrading) gr = p.grading;
    Ultragraph g(p.vertices, p.edges, gr);
    DiagnosticList diags;
    try {
        diags = g.validate();
    } catch (const PeriodOverflow& e) {
        diags.push_back({codes::kPeriod, e.what(), 0, 0});
    }
    if (gr) {
        for (const auto& [fam, lf] : *gr)
            if (!g.vertexFamily(fam)) diags.push_back({codes::kUndeclared, "grading for undeclared family '" + fam + "'"});
    }
    for (auto& d : diags) {
        // locate the first quoted family name in the message
        auto q = d.message.find('\'');
        if (q != std::string::npos) {
            auto e = d.message.find('\'', q + 1);
            auto it = p.where.find(d.message.substr(q + 1, e - q - 1));
            if (it != p.where.end()) {
                d.line = it->second.first;
                d.column = it->second.second;
                continue;
            }
        }
        if (d.code == codes::kSink) {
            auto at = d.message.find("vertex ");
            auto br = d.message.find('[', at);
            if (at != std::string::npos && br != std::string::npos) {
                auto it = p.where.find(d.message.substr(at + 7, br - at - 7));
                if (it != p.where.end()) {
                    d.line = it->second.first;
                    d.column = it->second.second;
                    continue;
                }
            }
        }
        if (d.line == 0) d.line = d.column = 1;
    }
    if (!diags.empty()) {
        out.diagnostics = std::move(diags);
        return out;
    }
    out.value = std::move(g);
    return out;
}

// ---------------------------------------------------------------------------
// bits, J and path specs

inline PeriodicBits parsePeriodicBits(const std::string& s) {
    auto tilde = s.find('~');
    if (tilde == std::string::npos) throw std::invalid_argument("periodic bits need '~': " + s);
    auto bits = [&](const std::string& part) {
        std::vector<std::uint8_t> v;
        for (char c : part) {
            if (c != '0' && c != '1') throw std::invalid_argument("bits must be 0 or 1: " + s);
            v.push_back(static_cast<std::uint8_t>(c == '1'));
        }
        return v;
    };
    auto cycle = bits(s.substr(tilde + 1));
    if (cycle.empty()) throw std::invalid_argument("periodic bits need a nonempty cycle: " + s);
    return PeriodicBits::make(bits(s.substr(0, tilde)), std::move(cycle));
}

/// `nat`, `shift:c`, `1,3,shift:4`, `sel:01~1`, `1,sel:~0`.
inline JPresentation parseJ(const std::string& s) {
    if (s == "nat") return JPresentation::naturals();
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    std::vector<Index> head;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (parts[i].empty() || parts[i].find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("J head entries must be numbers: " + s);
        head.push_back(std::stoull(parts[i]));
    }
    const std::string& last = parts.back();
    JPresentation j;
    if (last.rfind("shift:", 0) == 0) {
        std::string v = last.substr(6);
        if (v.empty() || v.find_first_not_of("-0123456789") != std::string::npos)
            throw std::invalid_argument("bad shift in J: " + s);
        j = JPresentation::shifted(std::move(head), std::stoll(v));
    } else if (last.rfind("sel:", 0) == 0) {
        j = JPresentation::selected(std::move(head), parsePeriodicBits(last.substr(4)));
    } else {
        throw std::invalid_argument("J must end with shift:<c> or sel:<bits>: " + s);
    }
    j.validate();
    return j;
}

/// `P~C`, `f(J)`, `beta(P~C;bits)`.
inline Bitstream parseBits(const std::string& s) {
    if (s.rfind("f(", 0) == 0 && !s.empty() && s.back() == ')') return fBitstream(parseJ(s.substr(2, s.size() - 3)));
    if (s.rfind("beta(", 0) == 0 && !s.empty() && s.back() == ')') {
        std::string inner = s.substr(5, s.size() - 6);
        auto semi = inner.find(';');
        if (semi == std::string::npos) throw std::invalid_argument("beta(alpha;gamma) needs ';': " + s);
        return betaEncode(parsePeriodicBits(inner.substr(0, semi)), parseBits(inner.substr(semi + 1)));
    }
    return Bitstream::periodic(parsePeriodicBits(s));
}

namespace io {

inline EdgeId edgeRef(Cursor& c) {
    std::string fam = c.ident();
    c.expect("[");
    Index k = c.number();
    c.expect("]");
    return {fam, k};
}

inline EdgePath edgeList(const Ultragraph& g, const std::string& text, const std::string& what) {
    EdgePath out;
    if (text.empty()) return out;
    Cursor c(lex(text));
    do {
        const Token& at = c.peek();
        EdgeId e = edgeRef(c);
        if (!g.hasEdge(e)) c.fail(codes::kUndeclared, "unknown edge " + e.str() + " in " + what, at);
        out.push_back(e);
    } while (c.accept(".") || c.accept(","));
    if (!c.atEnd()) c.fail("unexpected " + Cursor::describe(c.peek()) + " in " + what);
    return out;
}

inline VertexSet setPrimary(const Ultragraph& g, Cursor& c);

inline VertexSet setExpr(const Ultragraph& g, Cursor& c) {
    VertexSet s = setPrimary(g, c);
    while (true) {
        if (c.accept("+")) s = s.unite(setPrimary(g, c));
        else if (c.accept("&")) s = s.intersect(setPrimary(g, c));
        else break;
    }
    return s;
}

inline VertexSet setPrimary(const Ultragraph& g, Cursor& c) {
    if (c.accept("(")) {
        VertexSet s = setExpr(g, c);
        c.expect(")");
        return s;
    }
    if (c.is("r") && c.peek(1).text == "(") {
        c.next();
        c.expect("(");
        const Token& at = c.peek();
        EdgeId e = edgeRef(c);
        if (!g.hasEdge(e)) c.fail(codes::kUndeclared, "unknown edge " + e.str(), at);
        c.expect(")");
        return g.range(e);
    }
    auto vertex = [&](std::string fam, const Token& at) {
        c.expect("[");
        Index n = c.number();
        c.expect("]");
        VertexId v{std::move(fam), n};
        if (!g.hasVertex(v)) c.fail(codes::kUndeclared, "unknown vertex " + v.str(), at);
        return v;
    };
    if (c.accept("{")) {
        VertexSet s;
        if (c.accept("}")) return s;
        const Token& at = c.peek();
        std::string fam = c.ident();
        if (!g.vertexFamily(fam)) c.fail(codes::kUndeclared, "unknown vertex family '" + fam + "'", at);
        if (c.peek(1).kind != Token::Kind::Number || c.peek(2).text != "]") {
            // comprehension { fam[a*j+b] : guard }
            c.expect("[");
            std::string var;
            Affine ix = c.affine({}, &var);
            c.expect("]");
            c.expect(":");
            IndexSet guard = c.indexSet(var.empty() ? "j" : var);
            c.expect("}");
            return VertexSet::of(fam, affineImage(ix, guard));
        }
        s = VertexSet::singleton(vertex(fam, at));
        while (c.accept(",")) {
            const Token& at2 = c.peek();
            std::string f2 = c.ident();
            s = s.unite(VertexSet::singleton(vertex(f2, at2)));
        }
        c.expect("}");
        return s;
    }
    const Token& at = c.peek();
    std::string fam = c.ident();
    return VertexSet::singleton(vertex(fam, at));
}

inline std::vector<std::string> splitBars(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == '|' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace io

/// Parses a vertex-set expression such as `r(e[0]) & {u[2],u[4]}`.
inline Parsed<VertexSet> parseVertexSet(const std::string& text, const Ultragraph& g) {
    Parsed<VertexSet> out;
    try {
        io::Cursor c(io::lex(text));
        VertexSet s = io::setExpr(g, c);
        if (!c.atEnd()) c.fail("unexpected " + io::Cursor::describe(c.peek()));
        out.value = std::move(s);
    } catch (const io::ParseFailure& f) {
        out.diagnostics.push_back(f.diag);
    } catch (const PeriodOverflow& e) {
        out.diagnostics.push_back({codes::kPeriod, e.what(), 1, 1});
    }
    return out;
}

/**
 * Path specs: `ep:prefix|cycle`, `tail:prefix|family@start`,
 * `code:v|c1|c2|bits` (plain blocks), `bcode:v|c1|c2|bits` (balanced blocks),
 * `fin:edges|set`. Edges are `fam[k]` joined by '.'.
 */
inline Parsed<ShiftPoint> parsePathSpec(const std::string& text, const Ultragraph& g,
                                        const EmitterSearchOptions& emitterOpt = {}) {
    Parsed<ShiftPoint> out;
    auto fail = [&](const std::string& code, const std::string& msg) {
        out.diagnostics.push_back({code, msg, 1, 1});
        return out;
    };
    auto colon = text.find(':');
    if (colon == std::string::npos) return fail(codes::kSyntax, "path spec needs a kind prefix such as 'ep:'");
    std::string kind = text.substr(0, colon);
    auto fields = io::splitBars(text.substr(colon + 1));
    try {
        ShiftPoint x;
        if (kind == "ep") {
            if (fields.size() != 2) return fail(codes::kSyntax, "ep: expects prefix|cycle");
            EdgePath cycle = io::edgeList(g, fields[1], "cycle");
            if (cycle.empty()) return fail(codes::kPath, "cycle must be nonempty");
            x = makePeriodic(io::edgeList(g, fields[0], "prefix"), cycle);
        } else if (kind == "tail") {
            if (fields.size() != 2) return fail(codes::kSyntax, "tail: expects prefix|family@start");
            auto at = fields[1].find('@');
            if (at == std::string::npos) return fail(codes::kSyntax, "tail needs family@start");
            std::string num = fields[1].substr(at + 1);
            if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos)
                return fail(codes::kSyntax, "tail start must be a number");
            x = makeTail(io::edgeList(g, fields[0], "prefix"), fields[1].substr(0, at), std::stoull(num));
        } else if (kind == "code" || kind == "bcode") {
            if (fields.size() != 4) return fail(codes::kSyntax, kind + ": expects v|c1|c2|bits");
            io::Cursor c(io::lex(fields[0]));
            std::string fam = c.ident();
            c.expect("[");
            Index n = c.number();
            c.expect("]");
            x = makeCoded({fam, n}, io::edgeList(g, fields[1], "c1"), io::edgeList(g, fields[2], "c2"),
                          parseBits(fields[3]), kind == "bcode");
        } else if (kind == "fin") {
            if (fields.size() != 2) return fail(codes::kSyntax, "fin: expects edges|set");
            EdgePath alpha = io::edgeList(g, fields[0], "edges");
            auto set = parseVertexSet(fields[1], g);
            if (!set.ok()) {
                out.diagnostics = set.diagnostics;
                return out;
            }
            if (auto bad = brokenLink(g, alpha))
                return fail(codes::kPath, "edge link broken at position " + std::to_string(*bad));
            if (set->isEmpty()) return fail(codes::kEmitter, "terminal set is empty");
            if (!alpha.empty() && !set->isSubsetOf(g.range(alpha.back())))
                return fail(codes::kPath, "terminal set is not contained in r(" + alpha.back().str() + ")");
            auto m = minimalEmittersForPath(g, alpha, emitterOpt);
            bool found = std::any_of(m.emitters.begin(), m.emitters.end(),
                                     [&](const EmitterTrace& t) { return t.set == *set; });
            if (!found) return fail(codes::kEmitter, "terminal set is not a minimal infinite emitter");
            x = makeFinite(alpha, *set);
        } else {
            return fail(codes::kSyntax, "unknown path kind '" + kind + "'");
        }
        if (!x.isFinite())
            if (auto err = checkInfinitePath(g, x)) return fail(codes::kPath, *err);
        out.value = normalize(x);
    } catch (const io::ParseFailure& f) {
        out.diagnostics.push_back(f.diag);
    } catch (const OutOfDomain& e) {
        out.diagnostics.push_back({codes::kPath, e.what(), 1, 1});
    } catch (const std::invalid_argument& e) {
        out.diagnostics.push_back({codes::kSyntax, e.what(), 1, 1});
    } catch (const std::out_of_range& e) {
        out.diagnostics.push_back({codes::kSyntax, e.what(), 1, 1});
    }
    return out;
}

/// Spec string for a point; parsePathSpec(pathSpecStr(x)) denotes the same point.
inline std::string pathSpecStr(const ShiftPoint& x) {
    if (const auto* p = std::get_if<PeriodicPath>(&x.node))
        return "ep:" + edgePathStr(p->prefix) + "|" + edgePathStr(p->cycle);
    if (const auto* t = std::get_if<TailPath>(&x.node))
        return "tail:" + edgePathStr(t->prefix) + "|" + t->family + "@" + std::to_string(t->start);
    if (const auto* c = std::get_if<CodedPath>(&x.node)) {
        std::string s = std::string(c->balanced ? "bcode:" : "code:") + c->base.str() + "|" + edgePathStr(c->c1) +
                        "|" + edgePathStr(c->c2) + "|" + c->bits.str();
        if (c->skip) s += " (shifted " + std::to_string(c->skip) + ")";
        return s;
    }
    const auto& u = *x.finite();
    return "fin:" + edgePathStr(u.edges) + "|" + vertexSetExpr(u.terminal);
}

}  // namespace ultrashift

#endif  // ULTRASHIFT_IO_HPP
