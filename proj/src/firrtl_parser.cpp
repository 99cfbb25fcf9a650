#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>

#include "rtsim/error.hpp"
#include "rtsim/string_map.hpp"
#include "rtsim/firrtl.hpp"

namespace rtsim::firrtl {

const Port* ModuleAst::find_port(std::string_view port) const {
    for (const auto& p : ports) {
        if (p.name == port) {
            return &p;
        }
    }
    return nullptr;
}

const ModuleAst* CircuitAst::find_module(std::string_view name) const {
    for (const auto& m : modules) {
        if (m.name == name) {
            return &m;
        }
    }
    return nullptr;
}

namespace {

struct Token {
    enum class Kind : uint8_t { Ident, Int, String, Punct, End };
    Kind kind = Kind::End;
    std::string_view text;  // into the source text
};

struct Line {
    int number = 0;
    int indent = 0;
    std::span<const Token> tokens;  // into Lexed::pool
};

struct Lexed {
    std::vector<Token> pool;
    std::vector<Line> lines;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
// '-' appears in mem field names (data-type, read-latency), which must
// lex so the mem itself can be reported.
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '-';
}

void tokenize(std::string_view s, int line, std::vector<Token>& out) {
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
        } else if (c == ';') {
            break;
        } else if (c == '@' && i + 1 < s.size() && s[i + 1] == '[') {
            // source locator, e.g. @[Foo.scala 12:3]
            const auto close = s.find(']', i);
            if (close == std::string_view::npos) {
                throw SyntaxError(line, "unterminated source locator");
            }
            i = close + 1;
        } else if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && is_ident_char(s[j])) {
                ++j;
            }
            out.push_back({Token::Kind::Ident, s.substr(i, j - i)});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            std::size_t j = i + 1;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
                ++j;
            }
            out.push_back({Token::Kind::Int, s.substr(i, j - i)});
            i = j;
        } else if (c == '"') {
            const auto close = s.find('"', i + 1);
            if (close == std::string_view::npos) {
                throw SyntaxError(line, "unterminated string");
            }
            out.push_back({Token::Kind::String, s.substr(i + 1, close - i - 1)});
            i = close + 1;
        } else {
            static constexpr std::string_view two[] = {"<=", "<-", "=>"};
            bool matched = false;
            for (auto p : two) {
                if (s.substr(i, 2) == p) {
                    out.push_back({Token::Kind::Punct, p});
                    i += 2;
                    matched = true;
                    break;
                }
            }
            if (matched) {
                continue;
            }
            if (std::string_view(":,()<>.=[]{}").find(c) == std::string_view::npos) {
                throw SyntaxError(line, std::string("unexpected character '") + c + "'");
            }
            out.push_back({Token::Kind::Punct, s.substr(i, 1)});
            ++i;
        }
    }
}

const std::set<std::string, std::less<>> kUnsupportedKeywords = {
    "mem",    "cmem",  "smem",   "mport",  "read",   "write",   "infer",     "rdwr",
    "attach", "printf", "stop",  "assert", "assume", "cover",   "extmodule", "intmodule",
    "define", "regreset", "invalidate", "match", "else", "layerblock", "option"};

/// Cursor over the tokens of a single logical line.
class Cursor {
public:
    Cursor(const Line& line) : line_(line) {}

    int line() const { return line_.number; }
    bool at_end() const { return pos_ >= line_.tokens.size(); }
    const Token& peek(std::size_t ahead = 0) const {
        static const Token end{};
        return pos_ + ahead < line_.tokens.size() ? line_.tokens[pos_ + ahead] : end;
    }
    bool peek_punct(std::string_view p, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Token::Kind::Punct && t.text == p;
    }
    bool peek_ident(std::string_view p) const {
        const Token& t = peek();
        return t.kind == Token::Kind::Ident && t.text == p;
    }
    Token next() {
        if (at_end()) {
            fail("unexpected end of line");
        }
        return line_.tokens[pos_++];
    }
    void expect_punct(std::string_view p) {
        const Token t = next();
        if (t.kind != Token::Kind::Punct || t.text != p) {
            fail("expected '" + std::string(p) + "', found '" + std::string(t.text) + "'");
        }
    }
    bool accept_punct(std::string_view p) {
        if (peek_punct(p)) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::string expect_ident() {
        const Token t = next();
        if (t.kind != Token::Kind::Ident) {
            fail("expected identifier, found '" + std::string(t.text) + "'");
        }
        return std::string(t.text);
    }
    void expect_keyword(std::string_view k) {
        const Token t = next();
        if (t.kind != Token::Kind::Ident || t.text != k) {
            fail("expected '" + std::string(k) + "'");
        }
    }
    long long expect_int() {
        const Token t = next();
        if (t.kind != Token::Kind::Int) {
            fail("expected integer, found '" + std::string(t.text) + "'");
        }
        try {
            return std::stoll(std::string(t.text));
        } catch (const std::exception&) {
            fail("integer out of range");
        }
    }
    void expect_end() {
        if (!at_end()) {
            fail("unexpected '" + std::string(peek().text) + "'");
        }
    }
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_.number, msg); }

private:
    const Line& line_;
    std::size_t pos_ = 0;
};

uint8_t checked_width(Cursor& c, long long w) {
    if (w < 1) {
        c.fail("width must be at least 1");
    }
    if (w > static_cast<long long>(kMaxWidth)) {
        throw UnsupportedConstruct(c.line(), "width " + std::to_string(w) + " exceeds 128 bits");
    }
    return static_cast<uint8_t>(w);
}

Type parse_type(Cursor& c) {
    const Token t = c.next();
    if (t.kind == Token::Kind::Punct && (t.text == "{" || t.text == "[")) {
        throw UnsupportedConstruct(c.line(), "aggregate type");
    }
    if (t.kind != Token::Kind::Ident) {
        c.fail("expected type");
    }
    if (t.text == "Clock") {
        return Type{Type::Kind::Clock, 0};
    }
    if (t.text == "Analog") {
        throw UnsupportedConstruct(c.line(), "analog type");
    }
    if (t.text == "Reset" || t.text == "AsyncReset") {
        throw UnsupportedConstruct(c.line(), std::string(t.text) + " type");
    }
    if (t.text != "UInt" && t.text != "SInt") {
        c.fail("unknown type '" + std::string(t.text) + "'");
    }
    if (!c.accept_punct("<")) {
        c.fail("width required for " + std::string(t.text));
    }
    const uint8_t w = checked_width(c, c.expect_int());
    c.expect_punct(">");
    if (c.peek_punct("[")) {
        throw UnsupportedConstruct(c.line(), "aggregate type");
    }
    return Type{t.text == "SInt" ? Type::Kind::SInt : Type::Kind::UInt, w};
}

// Literal value text: decimal Int token or quoted "h1F" / "b101" / "o17" / "d12",
// optionally signed either before or after the radix letter.
struct ParsedValue {
    bool negative = false;
    u128 magnitude = 0;
};

ParsedValue parse_literal_value(Cursor& c, const Token& t) {
    ParsedValue v;
    std::string digits;
    unsigned base = 10;
    if (t.kind == Token::Kind::Int) {
        digits = t.text;
    } else if (t.kind == Token::Kind::String) {
        std::string s(t.text);
        if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
            v.negative = s[0] == '-';
            s.erase(0, 1);
        }
        if (s.empty()) {
            c.fail("empty literal");
        }
        switch (s[0]) {
        case 'h': base = 16; break;
        case 'b': base = 2; break;
        case 'o': base = 8; break;
        case 'd': base = 10; break;
        default: c.fail("bad literal radix in \"" + std::string(t.text) + "\"");
        }
        s.erase(0, 1);
        if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
            v.negative = s[0] == '-';
            s.erase(0, 1);
        }
        digits = s;
    } else {
        c.fail("expected literal value");
    }
    if (!digits.empty() && digits[0] == '-') {
        v.negative = true;
        digits.erase(0, 1);
    }
    const char* prefix = base == 16 ? "0x" : base == 2 ? "0b" : base == 8 ? "0o" : "";
    try {
        v.magnitude = parse_u128(std::string(prefix) + digits);
    } catch (const std::invalid_argument& e) {
        c.fail(std::string("bad literal: ") + e.what());
    }
    return v;
}

Literal make_literal(Cursor& c, bool is_signed, std::optional<uint8_t> width, const ParsedValue& v) {
    Literal lit;
    lit.is_signed = is_signed;
    if (!is_signed && v.negative && v.magnitude != 0) {
        c.fail("negative UInt literal");
    }
    unsigned needed;
    if (!is_signed) {
        needed = std::max(1u, bit_length(v.magnitude));
    } else if (v.negative) {
        // smallest w with -2^(w-1) <= -m
        needed = v.magnitude <= 1 ? 1 : bit_length(v.magnitude - 1) + 1;
    } else {
        needed = bit_length(v.magnitude) + 1;
    }
    if (width) {
        if (needed > *width) {
            c.fail("literal does not fit in width " + std::to_string(*width));
        }
        lit.width = *width;
        lit.explicit_width = true;
    } else {
        if (needed > kMaxWidth) {
            throw UnsupportedConstruct(c.line(), "literal wider than 128 bits");
        }
        lit.width = static_cast<uint8_t>(needed);
    }
    const u128 raw = v.negative ? u128{0} - v.magnitude : v.magnitude;
    lit.bits = raw & width_mask(lit.width);
    return lit;
}

Expr parse_expr(Cursor& c);

Expr parse_expr(Cursor& c) {
    const Token t = c.next();
    if (t.kind != Token::Kind::Ident) {
        c.fail("expected expression, found '" + std::string(t.text) + "'");
    }
    if ((t.text == "UInt" || t.text == "SInt") && (c.peek_punct("<") || c.peek_punct("("))) {
        std::optional<uint8_t> width;
        if (c.accept_punct("<")) {
            width = checked_width(c, c.expect_int());
            c.expect_punct(">");
        }
        c.expect_punct("(");
        const Token v = c.next();
        const ParsedValue pv = parse_literal_value(c, v);
        c.expect_punct(")");
        Expr e;
        e.kind = Expr::Kind::Literal;
        e.literal = make_literal(c, t.text == "SInt", width, pv);
        return e;
    }
    if (c.peek_punct("(")) {
        c.expect_punct("(");
        if (t.text == "validif") {
            throw UnsupportedConstruct(c.line(), "validif");
        }
        if (t.text == "asClock" || t.text == "asAsyncReset" || t.text == "asFixedPoint") {
            throw UnsupportedConstruct(c.line(), std::string(t.text));
        }
        Expr e;
        if (t.text == "mux") {
            e.kind = Expr::Kind::Mux;
            e.op = Opcode::Mux;
        } else {
            auto op = opcode_from_name(t.text);
            if (!op || *op == Opcode::Copy || *op == Opcode::MuxChain || *op == Opcode::Mux) {
                c.fail("unknown primitive operation '" + std::string(t.text) + "'");
            }
            e.kind = Expr::Kind::Prim;
            e.op = *op;
        }
        bool in_params = false;
        if (!c.peek_punct(")")) {
            for (;;) {
                if (c.peek().kind == Token::Kind::Int) {
                    const long long p = c.expect_int();
                    if (p < 0 || p > 0xFFFFFFFFLL) {
                        c.fail("static parameter out of range");
                    }
                    e.params.push_back(static_cast<uint32_t>(p));
                    in_params = true;
                } else {
                    if (in_params) {
                        c.fail("expression after integer parameter");
                    }
                    e.args.push_back(parse_expr(c));
                }
                if (!c.accept_punct(",")) {
                    break;
                }
            }
        }
        c.expect_punct(")");
        const unsigned want_args = e.kind == Expr::Kind::Mux ? 3 : info(e.op).arity;
        const unsigned want_params = e.kind == Expr::Kind::Mux ? 0 : info(e.op).num_params;
        if (e.args.size() != want_args || e.params.size() != want_params) {
            c.fail(std::string(t.text) + " expects " + std::to_string(want_args) + " operand(s) and " +
                   std::to_string(want_params) + " integer parameter(s)");
        }
        return e;
    }
    Expr e;
    e.name = t.text;
    if (c.accept_punct(".")) {
        e.kind = Expr::Kind::Field;
        e.field = c.expect_ident();
        if (c.peek_punct(".")) {
            throw UnsupportedConstruct(c.line(), "nested subfield");
        }
    } else {
        e.kind = Expr::Kind::Ref;
    }
    if (c.peek_punct("[")) {
        throw UnsupportedConstruct(c.line(), "subindex/subaccess");
    }
    return e;
}

struct ModuleScope {
    // local name -> declared type (Clock included); instances map to module names
    StringMap<Type> names;
    StringMap<std::string> instances;
};

void declare(Cursor& c, ModuleScope& scope, const std::string& name, Type type) {
    if (scope.names.count(name) || scope.instances.count(name)) {
        c.fail("redefinition of '" + name + "'");
    }
    scope.names.emplace(name, type);
}

void check_refs(Cursor& c, const ModuleScope& scope, const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Ref:
        if (!scope.names.count(e.name)) {
            if (scope.instances.count(e.name)) {
                c.fail("instance '" + e.name + "' used as a value");
            }
            c.fail("reference to undeclared '" + e.name + "'");
        }
        break;
    case Expr::Kind::Field:
        if (!scope.instances.count(e.name)) {
            c.fail("'" + e.name + "' is not an instance");
        }
        break;
    case Expr::Kind::Literal:
        break;
    case Expr::Kind::Prim:
    case Expr::Kind::Mux:
        for (const auto& a : e.args) {
            check_refs(c, scope, a);
        }
        break;
    }
}

Statement parse_statement(Cursor& c, ModuleScope& scope, const std::vector<Line>& lines, std::size_t& li) {
    Statement st;
    st.line = c.line();
    const Token& head = c.peek();
    if (head.kind == Token::Kind::Ident) {
        const std::string_view kw = head.text;
        const bool is_decl_kw = kw == "wire" || kw == "reg" || kw == "node" || kw == "inst";
        // `x <= ...` where x happens to be spelled like a keyword
        const bool is_connect = c.peek_punct("<=", 1) || c.peek_punct("<-", 1) || c.peek_punct(".", 1);
        if (!is_connect) {
            if (kw == "when") {
                throw UnsupportedConstruct(c.line(), "when");
            }
            if (kw == "input" || kw == "output") {
                c.fail("port declaration after statements");
            }
            if (kUnsupportedKeywords.count(kw) && !is_decl_kw) {
                throw UnsupportedConstruct(c.line(), std::string(kw));
            }
            if (kw == "skip") {
                c.next();
                c.expect_end();
                st.body = SkipStmt{};
                return st;
            }
            if (kw == "wire") {
                c.next();
                WireStmt w;
                w.name = c.expect_ident();
                c.expect_punct(":");
                w.type = parse_type(c);
                c.expect_end();
                declare(c, scope, w.name, w.type);
                st.body = std::move(w);
                return st;
            }
            if (kw == "node") {
                c.next();
                NodeStmt n;
                n.name = c.expect_ident();
                c.expect_punct("=");
                n.value = parse_expr(c);
                c.expect_end();
                check_refs(c, scope, n.value);
                declare(c, scope, n.name, Type{});
                st.body = std::move(n);
                return st;
            }
            if (kw == "inst") {
                c.next();
                InstStmt in;
                in.name = c.expect_ident();
                c.expect_keyword("of");
                in.module = c.expect_ident();
                c.expect_end();
                if (scope.names.count(in.name) || scope.instances.count(in.name)) {
                    c.fail("redefinition of '" + in.name + "'");
                }
                scope.instances.emplace(in.name, in.module);
                st.body = std::move(in);
                return st;
            }
            if (kw == "reg") {
                c.next();
                RegStmt r;
                r.name = c.expect_ident();
                c.expect_punct(":");
                r.type = parse_type(c);
                if (r.type.is_clock()) {
                    c.fail("register of Clock type");
                }
                c.expect_punct(",");
                r.clock = parse_expr(c);
                check_refs(c, scope, r.clock);
                declare(c, scope, r.name, r.type);
                if (c.peek_ident("with")) {
                    c.next();
                    c.expect_punct(":");
                    auto parse_reset = [&](Cursor& rc) {
                        const bool paren = rc.accept_punct("(");
                        rc.expect_keyword("reset");
                        rc.expect_punct("=>");
                        rc.expect_punct("(");
                        r.reset = parse_expr(rc);
                        rc.expect_punct(",");
                        r.init = parse_expr(rc);
                        rc.expect_punct(")");
                        if (paren) {
                            rc.expect_punct(")");
                        }
                        rc.expect_end();
                        check_refs(rc, scope, r.reset);
                        check_refs(rc, scope, r.init);
                        r.has_reset = true;
                    };
                    if (c.at_end()) {
                        // reset clause on the following, more indented line
                        if (li + 1 >= lines.size() || lines[li + 1].indent <= lines[li].indent) {
                            c.fail("expected reset clause after 'with :'");
                        }
                        ++li;
                        Cursor rc(lines[li]);
                        parse_reset(rc);
                    } else {
                        parse_reset(c);
                    }
                } else {
                    c.expect_end();
                }
                st.body = std::move(r);
                return st;
            }
        }
    }

    ConnectStmt con;
    con.target = parse_expr(c);
    if (con.target.kind != Expr::Kind::Ref && con.target.kind != Expr::Kind::Field) {
        c.fail("connect target must be a reference");
    }
    if (c.peek_ident("is")) {
        throw UnsupportedConstruct(c.line(), "is invalid");
    }
    if (c.peek_punct("<-")) {
        throw UnsupportedConstruct(c.line(), "partial connect");
    }
    c.expect_punct("<=");
    con.value = parse_expr(c);
    c.expect_end();
    check_refs(c, scope, con.target);
    check_refs(c, scope, con.value);
    st.body = std::move(con);
    return st;
}

Lexed split_lines(std::string_view text) {
    Lexed lx;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    lx.pool.reserve(text.size() / 3);
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        ++number;
        int indent = 0;
        while (static_cast<std::size_t>(indent) < raw.size() && (raw[indent] == ' ' || raw[indent] == '\t')) {
            ++indent;
        }
        const std::size_t first = lx.pool.size();
        tokenize(raw, number, lx.pool);
        if (lx.pool.size() > first) {
            lx.lines.push_back(Line{number, indent, {}});
            ranges.emplace_back(first, lx.pool.size() - first);
        }
        if (eol == std::string_view::npos) {
            break;
        }
        pos = eol + 1;
    }
    for (std::size_t k = 0; k < lx.lines.size(); ++k) {
        lx.lines[k].tokens = std::span<const Token>(lx.pool).subspan(ranges[k].first, ranges[k].second);
    }
    return lx;
}

void check_circuit(const CircuitAst& ast, int circuit_line) {
    StringMap<const ModuleAst*> by_name;
    for (const auto& m : ast.modules) {
        if (!by_name.emplace(m.name, &m).second) {
            throw SyntaxError(m.line, "duplicate module '" + m.name + "'");
        }
    }
    if (!by_name.count(ast.top)) {
        throw SyntaxError(circuit_line, "no module named '" + ast.top + "' (circuit top)");
    }
    for (const auto& m : ast.modules) {
        for (const auto& st : m.statements) {
            if (const auto* in = std::get_if<InstStmt>(&st.body)) {
                if (!by_name.count(in->module)) {
                    throw SyntaxError(st.line, "instance of undeclared module '" + in->module + "'");
                }
            }
        }
    }
    // instantiation cycles: DFS over the module graph
    StringMap<int> state;
    auto visit = [&](auto&& self, const ModuleAst& m) -> void {
        state[m.name] = 1;
        for (const auto& st : m.statements) {
            if (const auto* in = std::get_if<InstStmt>(&st.body)) {
                const int s = state[in->module];
                if (s == 1) {
                    throw SyntaxError(st.line, "recursive instantiation of '" + in->module + "'");
                }
                if (s == 0) {
                    self(self, *by_name.at(in->module));
                }
            }
        }
        state[m.name] = 2;
    };
    for (const auto& m : ast.modules) {
        if (state[m.name] == 0) {
            visit(visit, m);
        }
    }
}

}  // namespace

CircuitAst parse_firrtl(std::string_view text) {
    const Lexed lexed = split_lines(text);
    const std::vector<Line>& lines = lexed.lines;
    CircuitAst ast;
    std::size_t li = 0;
    if (li < lines.size() && lines[li].tokens[0].kind == Token::Kind::Ident &&
        lines[li].tokens[0].text == "FIRRTL") {
        ++li;  // version header
    }
    if (li >= lines.size()) {
        throw SyntaxError(lines.empty() ? 1 : lines.back().number, "expected 'circuit'");
    }
    const int circuit_line = lines[li].number;
    const int circuit_indent = lines[li].indent;
    {
        Cursor c(lines[li]);
        c.expect_keyword("circuit");
        ast.top = c.expect_ident();
        c.expect_punct(":");
        c.expect_end();
        ++li;
    }
    while (li < lines.size()) {
        const Line& mline = lines[li];
        Cursor c(mline);
        if (mline.indent <= circuit_indent) {
            c.fail("unexpected text outside circuit");
        }
        if (c.peek_ident("extmodule") || c.peek_ident("intmodule")) {
            throw UnsupportedConstruct(mline.number, std::string(c.peek().text));
        }
        c.expect_keyword("module");
        ModuleAst m;
        m.line = mline.number;
        m.name = c.expect_ident();
        c.expect_punct(":");
        c.expect_end();
        ++li;

        ModuleScope scope;
        unsigned clocks = 0;
        int body_indent = -1;
        while (li < lines.size() && lines[li].indent > mline.indent) {
            const Line& sl = lines[li];
            if (body_indent < 0) {
                body_indent = sl.indent;
            } else if (sl.indent != body_indent) {
                Cursor bad(sl);
                if (bad.peek_ident("else")) {
                    throw UnsupportedConstruct(sl.number, "when");
                }
                bad.fail("unexpected indentation");
            }
            Cursor sc(sl);
            if (sc.peek_ident("input") || sc.peek_ident("output")) {
                if (!m.statements.empty()) {
                    sc.fail("port declaration after statements");
                }
                Port p;
                p.line = sl.number;
                p.direction = sc.next().text == "input" ? Direction::Input : Direction::Output;
                p.name = sc.expect_ident();
                sc.expect_punct(":");
                p.type = parse_type(sc);
                sc.expect_end();
                if (p.type.is_clock()) {
                    if (p.direction == Direction::Output) {
                        throw UnsupportedConstruct(sl.number, "clock output port");
                    }
                    if (++clocks > 1) {
                        throw UnsupportedConstruct(sl.number, "multiple clocks");
                    }
                }
                declare(sc, scope, p.name, p.type);
                m.ports.push_back(std::move(p));
            } else {
                m.statements.push_back(parse_statement(sc, scope, lines, li));
            }
            ++li;
        }
        ast.modules.push_back(std::move(m));
    }
    check_circuit(ast, circuit_line);
    return ast;
}

}  // namespace rtsim::firrtl
