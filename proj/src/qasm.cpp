#include "qvm/qasm.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace qvm {

namespace {

struct Token {
    enum class Type { ident, number, symbol, str, end };
    Type type = Type::end;
    std::string text;
    int line = 1;
    int col = 1;
};

[[noreturn]] void fail(const std::string& msg, int line, int col) {
    throw ParseError(msg, line, col);
}

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token tok;
        tok.line = line;
        tok.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            tok.type = Token::Type::ident;
            tok.text = text.substr(i, j - i);
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i;
            while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
                    ++k;
                    while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
                    j = k;
                }
            }
            tok.type = Token::Type::number;
            tok.text = text.substr(i, j - i);
            advance(j - i);
        } else if (c == '"') {
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
            if (j >= text.size() || text[j] != '"') fail("unterminated string literal", line, col);
            tok.type = Token::Type::str;
            tok.text = text.substr(i + 1, j - i - 1);
            advance(j - i + 1);
        } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            tok.type = Token::Type::symbol;
            tok.text = "->";
            advance(2);
        } else if (std::string("();,[]{}+-*/").find(c) != std::string::npos) {
            tok.type = Token::Type::symbol;
            tok.text = std::string(1, c);
            advance(1);
        } else {
            fail(std::string("unexpected character '") + c + "'", line, col);
        }
        out.push_back(std::move(tok));
    }
    Token end;
    end.type = Token::Type::end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

const std::map<std::string, GateKind>& primitive_table() {
    static const std::map<std::string, GateKind> table = {
        {"h", GateKind::h},       {"x", GateKind::x},     {"y", GateKind::y},
        {"z", GateKind::z},       {"s", GateKind::s},     {"sdg", GateKind::sdg},
        {"t", GateKind::t},       {"tdg", GateKind::tdg}, {"rx", GateKind::rx},
        {"ry", GateKind::ry},     {"rz", GateKind::rz},   {"u", GateKind::u},
        {"cx", GateKind::cx},     {"cz", GateKind::cz},   {"swap", GateKind::swap},
    };
    return table;
}

// Constant-folding evaluator for angle expressions: +, -, *, /, unary sign,
// parentheses, pi, numeric literals, and gate parameters bound in env.
class ExprEval {
  public:
    ExprEval(const std::vector<Token>& toks, const std::map<std::string, double>& env)
        : toks_(toks), env_(env) {}

    double run() {
        if (toks_.empty()) fail("empty angle expression", 0, 0);
        double v = expr();
        if (pos_ != toks_.size())
            fail("trailing tokens in angle expression", toks_[pos_].line, toks_[pos_].col);
        return v;
    }

  private:
    const std::vector<Token>& toks_;
    const std::map<std::string, double>& env_;
    std::size_t pos_ = 0;

    const Token& peek() const {
        static const Token end{};
        return pos_ < toks_.size() ? toks_[pos_] : end;
    }
    bool eat(const char* sym) {
        if (peek().type == Token::Type::symbol && peek().text == sym) {
            ++pos_;
            return true;
        }
        return false;
    }

    double expr() {
        double v = term();
        while (true) {
            if (eat("+")) {
                v += term();
            } else if (eat("-")) {
                v -= term();
            } else {
                return v;
            }
        }
    }

    double term() {
        double v = factor();
        while (true) {
            if (eat("*")) {
                v *= factor();
            } else if (eat("/")) {
                v /= factor();
            } else {
                return v;
            }
        }
    }

    double factor() {
        if (eat("-")) return -factor();
        if (eat("+")) return factor();
        const Token& tok = peek();
        if (eat("(")) {
            double v = expr();
            if (!eat(")")) fail("expected ')' in angle expression", peek().line, peek().col);
            return v;
        }
        if (tok.type == Token::Type::number) {
            ++pos_;
            return std::stod(tok.text);
        }
        if (tok.type == Token::Type::ident) {
            ++pos_;
            if (tok.text == "pi") return M_PI;
            auto it = env_.find(tok.text);
            if (it == env_.end())
                fail("unknown identifier '" + tok.text + "' in angle expression", tok.line, tok.col);
            return it->second;
        }
        fail("malformed angle expression", tok.line, tok.col);
    }
};

// One statement inside a gate body, kept unevaluated so each call site can
// substitute its own parameter values.
struct BodyStmt {
    std::string name;
    std::vector<std::vector<Token>> param_exprs;
    std::vector<std::string> qargs;
    int line = 0;
    int col = 0;
};

struct GateDef {
    std::vector<std::string> params;
    std::vector<std::string> qargs;
    std::vector<BodyStmt> body;
};

// A gate operand before resolution: either one qubit or a whole register.
struct Operand {
    int index = -1;  // -1 means the full register
    int line = 0;
    int col = 0;
    std::string reg;
};

class Parser {
  public:
    Parser(std::vector<Token> toks, std::string name) : toks_(std::move(toks)) {
        circ_.name = std::move(name);
    }

    CircuitIR run() {
        header();
        while (peek().type != Token::Type::end) statement();
        if (qreg_name_.empty()) fail("no qreg declared", peek().line, peek().col);
        return std::move(circ_);
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    CircuitIR circ_;
    std::string qreg_name_;
    std::string creg_name_;
    std::map<std::string, GateDef> defs_;
    std::vector<bool> clbit_used_;
    bool measured_ = false;

    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    const Token& expect(Token::Type type, const char* what) {
        if (peek().type != type) fail(std::string("expected ") + what, peek().line, peek().col);
        return next();
    }
    void expect_symbol(const char* sym) {
        if (peek().type != Token::Type::symbol || peek().text != sym)
            fail(std::string("expected '") + sym + "'", peek().line, peek().col);
        ++pos_;
    }
    bool eat_symbol(const char* sym) {
        if (peek().type == Token::Type::symbol && peek().text == sym) {
            ++pos_;
            return true;
        }
        return false;
    }

    void header() {
        const Token& kw = peek();
        if (kw.type == Token::Type::ident && kw.text == "OPENQASM") {
            ++pos_;
            expect(Token::Type::number, "version number");
            expect_symbol(";");
        } else {
            fail("file must start with an OPENQASM 2.0 header", kw.line, kw.col);
        }
    }

    int parse_size_suffix() {
        expect_symbol("[");
        const Token& num = expect(Token::Type::number, "register size");
        expect_symbol("]");
        int n = std::stoi(num.text);
        if (n < 1) fail("register size must be positive", num.line, num.col);
        return n;
    }

    void statement() {
        const Token& tok = peek();
        if (tok.type != Token::Type::ident)
            fail("expected a statement", tok.line, tok.col);
        if (tok.text == "include") {
            ++pos_;
            expect(Token::Type::str, "include path");
            expect_symbol(";");
        } else if (tok.text == "qreg") {
            ++pos_;
            if (!qreg_name_.empty())
                fail("only one qreg is supported", tok.line, tok.col);
            qreg_name_ = expect(Token::Type::ident, "register name").text;
            circ_.num_qubits = parse_size_suffix();
            expect_symbol(";");
        } else if (tok.text == "creg") {
            ++pos_;
            if (!creg_name_.empty())
                fail("only one creg is supported", tok.line, tok.col);
            creg_name_ = expect(Token::Type::ident, "register name").text;
            circ_.num_clbits = parse_size_suffix();
            clbit_used_.assign(static_cast<std::size_t>(circ_.num_clbits), false);
            expect_symbol(";");
        } else if (tok.text == "gate") {
            ++pos_;
            gate_definition();
        } else if (tok.text == "measure") {
            ++pos_;
            measure_statement(tok.line, tok.col);
        } else if (tok.text == "barrier") {
            ++pos_;
            barrier_statement();
        } else if (tok.text == "opaque" || tok.text == "if" || tok.text == "reset") {
            fail("unsupported statement '" + tok.text + "' at line " + std::to_string(tok.line),
                 tok.line, tok.col);
        } else {
            gate_call_statement();
        }
    }

    void gate_definition() {
        const Token& name_tok = expect(Token::Type::ident, "gate name");
        std::string name = name_tok.text;
        if (primitive_table().count(name) || name == "measure" || name == "barrier")
            fail("cannot redefine built-in gate '" + name + "'", name_tok.line, name_tok.col);
        if (defs_.count(name))
            fail("gate '" + name + "' defined twice", name_tok.line, name_tok.col);

        GateDef def;
        if (eat_symbol("(")) {
            if (!eat_symbol(")")) {
                do {
                    def.params.push_back(expect(Token::Type::ident, "parameter name").text);
                } while (eat_symbol(","));
                expect_symbol(")");
            }
        }
        do {
            def.qargs.push_back(expect(Token::Type::ident, "qubit argument name").text);
        } while (eat_symbol(","));

        expect_symbol("{");
        while (!eat_symbol("}")) {
            const Token& st = expect(Token::Type::ident, "gate body statement");
            if (st.text == "measure")
                fail("measure is not allowed inside gate definitions", st.line, st.col);
            BodyStmt stmt;
            stmt.name = st.text;
            stmt.line = st.line;
            stmt.col = st.col;
            if (eat_symbol("(")) stmt.param_exprs = collect_param_exprs();
            do {
                stmt.qargs.push_back(expect(Token::Type::ident, "qubit argument").text);
            } while (eat_symbol(","));
            expect_symbol(";");
            for (const auto& q : stmt.qargs) {
                bool known = false;
                for (const auto& formal : def.qargs) known = known || formal == q;
                if (!known && stmt.name != "barrier")
                    fail("unknown qubit argument '" + q + "' in gate body", stmt.line, stmt.col);
            }
            def.body.push_back(std::move(stmt));
        }
        defs_[name] = std::move(def);
    }

    // Reads comma-separated expression token runs up to the closing paren,
    // respecting nesting. The opening paren is already consumed.
    std::vector<std::vector<Token>> collect_param_exprs() {
        std::vector<std::vector<Token>> exprs;
        std::vector<Token> cur;
        int depth = 0;
        while (true) {
            const Token& tok = peek();
            if (tok.type == Token::Type::end)
                fail("unterminated parameter list", tok.line, tok.col);
            if (tok.type == Token::Type::symbol) {
                if (tok.text == "(") ++depth;
                if (tok.text == ")") {
                    if (depth == 0) {
                        ++pos_;
                        exprs.push_back(std::move(cur));
                        return exprs;
                    }
                    --depth;
                }
                if (tok.text == "," && depth == 0) {
                    ++pos_;
                    exprs.push_back(std::move(cur));
                    cur.clear();
                    continue;
                }
            }
            cur.push_back(tok);
            ++pos_;
        }
    }

    Operand parse_operand(const char* what) {
        const Token& name = expect(Token::Type::ident, what);
        Operand op;
        op.reg = name.text;
        op.line = name.line;
        op.col = name.col;
        if (eat_symbol("[")) {
            const Token& num = expect(Token::Type::number, "index");
            op.index = std::stoi(num.text);
            expect_symbol("]");
        }
        return op;
    }

    int resolve_qubit(const Operand& op) const {
        if (op.reg != qreg_name_)
            fail("unknown register '" + op.reg + "'", op.line, op.col);
        if (op.index < 0 || op.index >= circ_.num_qubits)
            fail(op.reg + "[" + std::to_string(op.index) + "] out of range", op.line, op.col);
        return op.index;
    }

    void guard_terminal(GateKind kind, int line, int col) const {
        if (measured_ && kind != GateKind::measure && kind != GateKind::barrier)
            fail("gate after measure; measures must be terminal", line, col);
    }

    void append(Gate g, int line, int col) {
        guard_terminal(g.kind, line, col);
        if (g.kind == GateKind::measure) measured_ = true;
        circ_.gates.push_back(std::move(g));
    }

    void measure_statement(int line, int col) {
        Operand src = parse_operand("qubit operand");
        expect_symbol("->");
        Operand dst = parse_operand("clbit operand");
        expect_symbol(";");
        if (creg_name_.empty()) fail("measure without a creg", line, col);
        if (dst.reg != creg_name_) fail("unknown register '" + dst.reg + "'", dst.line, dst.col);
        if ((src.index < 0) != (dst.index < 0))
            fail("measure operands must both be indexed or both whole registers", line, col);

        auto emit = [&](int q, int c) {
            if (c < 0 || c >= circ_.num_clbits)
                fail(creg_name_ + "[" + std::to_string(c) + "] out of range", dst.line, dst.col);
            if (clbit_used_[static_cast<std::size_t>(c)])
                fail(creg_name_ + "[" + std::to_string(c) + "] measured twice", line, col);
            clbit_used_[static_cast<std::size_t>(c)] = true;
            Gate g;
            g.kind = GateKind::measure;
            g.qubits = {q};
            g.clbit = c;
            append(std::move(g), line, col);
        };
        if (src.index < 0) {
            if (circ_.num_qubits != circ_.num_clbits)
                fail("broadcast measure needs equally sized registers", line, col);
            for (int i = 0; i < circ_.num_qubits; ++i) emit(i, i);
        } else {
            emit(resolve_qubit(src), dst.index);
        }
    }

    void barrier_statement() {
        Gate g;
        g.kind = GateKind::barrier;
        const Token& first = peek();
        do {
            Operand op = parse_operand("barrier operand");
            if (op.index < 0) {
                if (op.reg != qreg_name_)
                    fail("unknown register '" + op.reg + "'", op.line, op.col);
                for (int i = 0; i < circ_.num_qubits; ++i) g.qubits.push_back(i);
            } else {
                g.qubits.push_back(resolve_qubit(op));
            }
        } while (eat_symbol(","));
        expect_symbol(";");
        append(std::move(g), first.line, first.col);
    }

    void gate_call_statement() {
        const Token& name_tok = next();
        std::vector<std::vector<Token>> param_exprs;
        if (eat_symbol("(")) param_exprs = collect_param_exprs();
        std::vector<Operand> operands;
        do {
            operands.push_back(parse_operand("qubit operand"));
        } while (eat_symbol(","));
        expect_symbol(";");

        std::map<std::string, double> empty_env;
        emit_call(name_tok.text, param_exprs, operands, empty_env, 0, name_tok.line, name_tok.col);
    }

    void emit_call(const std::string& name, const std::vector<std::vector<Token>>& param_exprs,
                   const std::vector<Operand>& operands, const std::map<std::string, double>& env,
                   int depth, int line, int col) {
        if (depth > 64)
            fail("gate expansion too deep; recursive definition of '" + name + "'?", line, col);

        auto prim = primitive_table().find(name);
        if (prim != primitive_table().end()) {
            emit_primitive(prim->second, param_exprs, operands, env, line, col);
            return;
        }
        auto def_it = defs_.find(name);
        if (def_it == defs_.end())
            fail("unsupported gate '" + name + "' at line " + std::to_string(line), line, col);
        const GateDef& def = def_it->second;
        if (param_exprs.size() != def.params.size())
            fail("gate '" + name + "' expects " + std::to_string(def.params.size()) +
                     " parameter(s), got " + std::to_string(param_exprs.size()),
                 line, col);
        if (operands.size() != def.qargs.size())
            fail("gate '" + name + "' expects " + std::to_string(def.qargs.size()) +
                     " operand(s), got " + std::to_string(operands.size()),
                 line, col);

        std::map<std::string, double> call_env;
        for (std::size_t i = 0; i < def.params.size(); ++i)
            call_env[def.params[i]] = ExprEval(param_exprs[i], env).run();

        std::map<std::string, Operand> qubit_env;
        for (std::size_t i = 0; i < def.qargs.size(); ++i) {
            if (operands[i].index < 0)
                fail("register broadcast through user gate '" + name + "' is unsupported",
                     operands[i].line, operands[i].col);
            qubit_env[def.qargs[i]] = operands[i];
        }

        for (const BodyStmt& stmt : def.body) {
            std::vector<Operand> sub_ops;
            for (const auto& formal : stmt.qargs) {
                auto it = qubit_env.find(formal);
                if (it == qubit_env.end())
                    fail("unknown qubit argument '" + formal + "' in gate body", stmt.line, stmt.col);
                sub_ops.push_back(it->second);
            }
            if (stmt.name == "barrier") {
                Gate g;
                g.kind = GateKind::barrier;
                for (const auto& op : sub_ops) g.qubits.push_back(resolve_qubit(op));
                append(std::move(g), stmt.line, stmt.col);
                continue;
            }
            emit_call(stmt.name, stmt.param_exprs, sub_ops, call_env, depth + 1, stmt.line,
                      stmt.col);
        }
    }

    void emit_primitive(GateKind kind, const std::vector<std::vector<Token>>& param_exprs,
                        const std::vector<Operand>& operands,
                        const std::map<std::string, double>& env, int line, int col) {
        int want_params = gate_param_count(kind);
        if (static_cast<int>(param_exprs.size()) != want_params)
            fail(std::string("gate '") + gate_name(kind) + "' expects " +
                     std::to_string(want_params) + " parameter(s), got " +
                     std::to_string(param_exprs.size()),
                 line, col);
        std::vector<double> params;
        params.reserve(param_exprs.size());
        for (const auto& toks : param_exprs) params.push_back(ExprEval(toks, env).run());

        int arity = gate_arity(kind);
        if (static_cast<int>(operands.size()) != arity)
            fail(std::string("gate '") + gate_name(kind) + "' expects " + std::to_string(arity) +
                     " operand(s), got " + std::to_string(operands.size()),
                 line, col);

        if (arity == 1 && operands[0].index < 0) {
            if (operands[0].reg != qreg_name_)
                fail("unknown register '" + operands[0].reg + "'", operands[0].line,
                     operands[0].col);
            for (int i = 0; i < circ_.num_qubits; ++i) {
                Gate g;
                g.kind = kind;
                g.qubits = {i};
                g.params = params;
                append(std::move(g), line, col);
            }
            return;
        }

        Gate g;
        g.kind = kind;
        g.params = std::move(params);
        for (const auto& op : operands) {
            if (op.index < 0)
                fail(std::string("register operands are unsupported for gate '") +
                         gate_name(kind) + "'",
                     op.line, op.col);
            g.qubits.push_back(resolve_qubit(op));
        }
        if (arity == 2 && g.qubits[0] == g.qubits[1])
            fail(std::string("gate '") + gate_name(kind) + "' needs distinct qubits", line, col);
        append(std::move(g), line, col);
    }
};

}  // namespace

const char* gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::h: return "h";
        case GateKind::x: return "x";
        case GateKind::y: return "y";
        case GateKind::z: return "z";
        case GateKind::s: return "s";
        case GateKind::sdg: return "sdg";
        case GateKind::t: return "t";
        case GateKind::tdg: return "tdg";
        case GateKind::rx: return "rx";
        case GateKind::ry: return "ry";
        case GateKind::rz: return "rz";
        case GateKind::u: return "u";
        case GateKind::cx: return "cx";
        case GateKind::cz: return "cz";
        case GateKind::swap: return "swap";
        case GateKind::measure: return "measure";
        case GateKind::barrier: return "barrier";
    }
    return "?";
}

int gate_arity(GateKind kind) {
    switch (kind) {
        case GateKind::cx:
        case GateKind::cz:
        case GateKind::swap: return 2;
        case GateKind::barrier: return 0;
        default: return 1;
    }
}

int gate_param_count(GateKind kind) {
    switch (kind) {
        case GateKind::rx:
        case GateKind::ry:
        case GateKind::rz: return 1;
        case GateKind::u: return 3;
        default: return 0;
    }
}

bool is_two_qubit(GateKind kind) { return gate_arity(GateKind(kind)) == 2; }

int CircuitIR::gate_count(GateKind kind) const {
    int n = 0;
    for (const auto& g : gates) n += g.kind == kind ? 1 : 0;
    return n;
}

int CircuitIR::two_qubit_gate_count() const {
    int n = 0;
    for (const auto& g : gates) n += is_two_qubit(g.kind) ? 1 : 0;
    return n;
}

CircuitIR parse_qasm(const std::string& text, const std::string& name) {
    Parser parser(tokenize(text), name);
    return parser.run();
}

CircuitIR load_qasm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open QASM file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::size_t slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = base.find_last_of('.');
    if (dot != std::string::npos) base = base.substr(0, dot);
    return parse_qasm(buf.str(), base);
}

std::uint64_t structural_hash(const CircuitIR& circ) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(static_cast<std::uint64_t>(circ.num_qubits));
    mix(static_cast<std::uint64_t>(circ.num_clbits));
    for (const Gate& g : circ.gates) {
        mix(static_cast<std::uint64_t>(g.kind) + 1);
        mix(g.qubits.size());
        for (int q : g.qubits) mix(static_cast<std::uint64_t>(q) + 1);
        mix(static_cast<std::uint64_t>(g.clbit + 2));
        mix(g.params.size());
        // Angles are rounded so that -0.0 and tiny churn cannot split keys.
        for (double p : g.params) mix(static_cast<std::uint64_t>(std::llround(p * 1e9)) + 3);
    }
    return h;
}

}  // namespace qvm
