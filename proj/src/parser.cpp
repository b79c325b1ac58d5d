#include "hopi/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "hopi/errors.hpp"
#include "hopi/sugar.hpp"

namespace hopi {

namespace {

enum class Tok {
    Ident,
    Zero,
    Int,
    LParen,
    RParen,
    Lt,
    Gt,
    Comma,
    Dot,
    Bar,
    Bang,
    Backslash,
    Eq,
    Semi,
    LBracket,
    RBracket,
    End
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view src) {
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
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        const int l = line, co = col;
        if (c == '#')
            throw ParseError(l, co, "identifier (names starting with '#' are reserved)");
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, co});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            std::string text(src.substr(i, j - i));
            out.push_back({text == "0" ? Tok::Zero : Tok::Int, text, l, co});
            advance(j - i);
            continue;
        }
        Tok k;
        switch (c) {
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case '<': k = Tok::Lt; break;
            case '>': k = Tok::Gt; break;
            case ',': k = Tok::Comma; break;
            case '.': k = Tok::Dot; break;
            case '|': k = Tok::Bar; break;
            case '!': k = Tok::Bang; break;
            case '\\': k = Tok::Backslash; break;
            case '=': k = Tok::Eq; break;
            case ';': k = Tok::Semi; break;
            case '[': k = Tok::LBracket; break;
            case ']': k = Tok::RBracket; break;
            default:
                throw ParseError(l, co, std::string("a term (unexpected character '") + c + "')");
        }
        out.push_back({k, std::string(1, c), l, co});
        advance(1);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

bool is_keyword(const std::string& s) { return s == "new" || s == "tau" || s == "def"; }
bool is_process_ident(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

class Parser {
public:
    Parser(std::vector<Token> toks, CalcId calc) : toks_(std::move(toks)), calc_(calc) {}

    void set_calc(const CalcId& calc) { calc_ = calc; }

    Term term() { return parse_par(); }

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    bool at(Tok k) const { return peek().kind == k; }
    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    Token expect(Tok k, const std::string& what) {
        if (!at(k)) fail(what);
        return take();
    }

    [[noreturn]] void fail(const std::string& what) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.line, t.col, what + " (found " + found + ")");
    }

private:
    struct ScopeEntry {
        std::string id;
        bool is_variable;
    };

    Name resolve(const std::string& id) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->id == id) return it->is_variable ? Name::variable(id) : Name::constant(id);
        return Name::constant(id);
    }

    Name expect_name() {
        if (!at(Tok::Ident) || is_process_ident(peek().text) || is_keyword(peek().text))
            fail("a name (lowercase identifier)");
        return resolve(take().text);
    }

    Term parse_par() {
        Term left = parse_prefixed();
        while (at(Tok::Bar)) {
            take();
            Term right = parse_prefixed();
            left = par(left, right);
        }
        return left;
    }

    bool at_name_ident(std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Ident && !is_process_ident(t.text) && !is_keyword(t.text);
    }

    // Binds the input binder (when it is a name variable) while parsing the body.
    Term with_binder(const std::string& binder, ParamKind kind, auto&& parse_body) {
        if (kind == ParamKind::Name) scope_.push_back({binder, true});
        Term body = parse_body();
        if (kind == ParamKind::Name) scope_.pop_back();
        return body;
    }

    static std::string unused_binder(const Term& body) {
        std::set<std::string> ids = all_ids(body);
        for (std::size_t k = 0;; ++k) {
            for (const char* base : {"X", "Y", "Z", "W"}) {
                std::string cand = base + (k ? std::to_string(k) : std::string());
                if (!ids.contains(cand)) return cand;
            }
        }
    }

    Term parse_prefixed() {
        const Token& t = peek();
        if (t.kind == Tok::Ident && t.text == "new") {
            take();
            if (!at_name_ident()) fail("a name after 'new'");
            std::string c = take().text;
            expect(Tok::Dot, "'.' after restricted name");
            scope_.push_back({c, false});
            Term body = parse_prefixed();
            scope_.pop_back();
            return res(c, body);
        }
        if (t.kind == Tok::Ident && t.text == "tau") {
            take();
            expect(Tok::Dot, "'.' after tau");
            return encode_tau(parse_prefixed(), calc_);
        }
        if (t.kind == Tok::Backslash) return parse_abs();
        if (t.kind == Tok::Bang) {
            take();
            return parse_replication();
        }
        if (at_name_ident() && peek(1).kind == Tok::LParen) {
            Name subject = resolve(take().text);
            take();
            if (!at(Tok::Ident) || is_keyword(peek().text)) fail("an input binder");
            std::string binder = take().text;
            expect(Tok::RParen, "')' after input binder");
            expect(Tok::Dot, "'.' after input prefix");
            ParamKind kind = is_process_ident(binder) ? ParamKind::Process : ParamKind::Name;
            Term body = with_binder(binder, kind, [&] { return parse_prefixed(); });
            return input(subject, binder, body, kind);
        }
        if (at_name_ident() && peek(1).kind == Tok::Dot) {
            Name subject = resolve(take().text);
            take();
            Term body = parse_prefixed();
            return input(subject, unused_binder(body), body);
        }
        if (at_name_ident() && peek(1).kind == Tok::Bang) {
            Name subject = resolve(take().text);
            take();
            Term payload = dummy_payload(calc_);
            if (at(Tok::Lt)) {
                take();
                payload = parse_par();
                expect(Tok::Gt, "'>' closing the output payload");
            }
            Term cont = nil();
            if (at(Tok::Dot)) {
                take();
                cont = parse_prefixed();
            }
            return output(subject, payload, cont);
        }
        return parse_app();
    }

    Term parse_abs() {
        take();
        expect(Tok::LParen, "'(' opening the parameter list");
        std::vector<std::string> params;
        for (;;) {
            if (!at(Tok::Ident) || is_keyword(peek().text)) fail("a parameter");
            params.push_back(take().text);
            if (at(Tok::Comma)) {
                take();
                continue;
            }
            break;
        }
        expect(Tok::RParen, "')' closing the parameter list");
        expect(Tok::Dot, "'.' after the parameter list");
        const bool process = is_process_ident(params.front());
        for (const auto& p : params)
            if (is_process_ident(p) != process)
                fail("parameters of one kind (process variables and names cannot be mixed)");
        std::vector<std::string> sorted = params;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            fail("pairwise distinct parameters");
        if (!process)
            for (const auto& p : params) scope_.push_back({p, true});
        Term body = parse_prefixed();
        if (!process) scope_.resize(scope_.size() - params.size());
        return abs(std::move(params), body, process ? ParamKind::Process : ParamKind::Name);
    }

    Term parse_replication() {
        if (!at_name_ident()) fail("an input or output prefix after '!'");
        Name subject = resolve(take().text);
        if (at(Tok::LParen)) {
            take();
            if (!at(Tok::Ident) || is_keyword(peek().text)) fail("an input binder");
            std::string binder = take().text;
            expect(Tok::RParen, "')' after input binder");
            expect(Tok::Dot, "'.' after the replicated prefix");
            ParamKind kind = is_process_ident(binder) ? ParamKind::Process : ParamKind::Name;
            Term body = with_binder(binder, kind, [&] { return parse_prefixed(); });
            return encode_replication(Prefix::in(subject, binder, kind), body, calc_);
        }
        if (at(Tok::Bang)) {
            take();
            Term payload = dummy_payload(calc_);
            if (at(Tok::Lt)) {
                take();
                payload = parse_par();
                expect(Tok::Gt, "'>' closing the output payload");
            }
            expect(Tok::Dot, "'.' after the replicated prefix");
            Term body = parse_prefixed();
            return encode_replication(Prefix::out(subject, payload), body, calc_);
        }
        expect(Tok::Dot, "'(', '!' or '.' after the replicated subject");
        Term body = parse_prefixed();
        return encode_replication(Prefix::in(subject, unused_binder(body)), body, calc_);
    }

    Term parse_app() {
        Term t = parse_atom();
        while (at(Tok::Lt)) {
            take();
            std::vector<Arg> args;
            for (;;) {
                if (calc_.family == CalcId::Family::Pid)
                    args.emplace_back(expect_name());
                else
                    args.emplace_back(parse_par());
                if (at(Tok::Comma)) {
                    take();
                    continue;
                }
                break;
            }
            expect(Tok::Gt, "'>' closing the argument list");
            t = app(t, std::move(args));
        }
        return t;
    }

    Term parse_atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Zero:
                take();
                return nil();
            case Tok::LParen: {
                take();
                Term inner = parse_par();
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::Ident:
                if (is_keyword(t.text)) break;
                if (is_process_ident(t.text)) return var(take().text);
                return input(resolve(take().text), "X", nil());
            default:
                break;
        }
        fail("a term");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    CalcId calc_;
    std::vector<ScopeEntry> scope_;
};

}  // namespace

Term parse_term(std::string_view src, const CalcId& calc, const ParseOptions& opts) {
    Parser p(lex(src), calc);
    Term t = p.term();
    p.expect(Tok::End, "end of input or an operator");
    if (opts.check_sorts) sort_check(t, calc);
    return t;
}

void DefEnv::add(Definition def) {
    if (defs_.contains(def.name)) throw DuplicateDefError(def.name);
    std::string key = def.name;
    defs_.emplace(std::move(key), std::move(def));
}

const Definition* DefEnv::find(const std::string& name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : &it->second;
}

DefEnv parse_defs(std::string_view text) {
    DefEnv env;
    Parser p(lex(text), CalcId::pi_D(1));
    while (!p.at(Tok::End)) {
        Token kw = p.peek();
        if (kw.kind != Tok::Ident || kw.text != "def") p.fail("'def'");
        p.take();
        Token name = p.expect(Tok::Ident, "a definition name");
        if (is_keyword(name.text)) p.fail("a definition name");
        CalcId calc = CalcId::pi_D(1);
        if (p.at(Tok::LBracket)) {
            p.take();
            std::string calc_text;
            Token calc_tok = p.peek();
            while (!p.at(Tok::RBracket) && !p.at(Tok::End)) calc_text += p.take().text + " ";
            p.expect(Tok::RBracket, "']' closing the calculus");
            try {
                calc = CalcId::parse(calc_text);
            } catch (const HopiError&) {
                throw ParseError(calc_tok.line, calc_tok.col, "a calculus (Pi, PiD <n> or Pid <n>)");
            }
        }
        p.expect(Tok::Eq, "'='");
        p.set_calc(calc);
        Term body = p.term();
        p.expect(Tok::Semi, "';' ending the definition");

        sort_check(body, calc);
        FreeVars fv = free_vars(body);
        if (!fv.empty()) {
            std::vector<std::string> free(fv.process.begin(), fv.process.end());
            free.insert(free.end(), fv.names.begin(), fv.names.end());
            throw OpenTermError(name.text, std::move(free));
        }
        env.add(Definition{name.text, calc, body, name.line, name.col});
    }
    return env;
}

DefEnv load_defs(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read definition file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_defs(ss.str());
}

}  // namespace hopi
