#include "wagner/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>

namespace wagner {

namespace {

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

NodePtr number_node(double v) {
    Node n;
    n.kind = Node::Kind::Number;
    n.number = v;
    return make(std::move(n));
}

NodePtr const_node(Node::Kind k) {
    Node n;
    n.kind = k;
    return make(std::move(n));
}

NodePtr var_node(Var v) {
    Node n;
    n.kind = Node::Kind::Variable;
    n.var = v;
    return make(std::move(n));
}

NodePtr neg_node(NodePtr a) {
    Node n;
    n.kind = Node::Kind::Neg;
    n.lhs = std::move(a);
    return make(std::move(n));
}

NodePtr bin_node(BinOp op, NodePtr a, NodePtr b) {
    Node n;
    n.kind = Node::Kind::Binary;
    n.op = op;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return make(std::move(n));
}

NodePtr call_node(Fn f, NodePtr a) {
    Node n;
    n.kind = Node::Kind::Call;
    n.fn = f;
    n.lhs = std::move(a);
    return make(std::move(n));
}

const std::map<std::string, Fn, std::less<>>& function_table() {
    static const std::map<std::string, Fn, std::less<>> table = {
        {"sin", Fn::Sin},   {"cos", Fn::Cos},   {"tan", Fn::Tan},
        {"exp", Fn::Exp},   {"log", Fn::Log},   {"sqrt", Fn::Sqrt},
        {"sinh", Fn::Sinh}, {"cosh", Fn::Cosh}, {"tanh", Fn::Tanh},
        {"abs", Fn::Abs},
    };
    return table;
}

struct Parser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) { throw SyntaxError(what, pos); }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (true) {
            if (consume('+'))
                lhs = bin_node(BinOp::Add, lhs, parse_term());
            else if (consume('-'))
                lhs = bin_node(BinOp::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        while (true) {
            if (consume('*'))
                lhs = bin_node(BinOp::Mul, lhs, parse_unary());
            else if (consume('/'))
                lhs = bin_node(BinOp::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    // Unary minus binds looser than ^, so -x^2 is -(x^2).
    NodePtr parse_unary() {
        if (consume('-')) return neg_node(parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (consume('^')) return bin_node(BinOp::Pow, base, parse_unary());  // right assoc
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of expression");
        const char c = text[pos];

        if (c == '(') {
            ++pos;
            NodePtr inner = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* first = text.data() + pos;
        const char* last = text.data() + text.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr == first) fail("malformed number");
        pos = static_cast<std::size_t>(ptr - text.data());
        return number_node(value);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        const std::string_view name = text.substr(start, pos - start);

        if (peek() == '(') {
            auto it = function_table().find(name);
            if (it == function_table().end())
                throw UnknownIdentifier(std::string(name), start);
            ++pos;  // '('
            NodePtr arg = parse_expr();
            if (!consume(')')) fail("expected ')' after function argument");
            return call_node(it->second, arg);
        }
        if (name == "u") return var_node(Var::U);
        if (name == "v") return var_node(Var::V);
        if (name == "pi") return const_node(Node::Kind::ConstPi);
        if (name == "e") return const_node(Node::Kind::ConstE);
        throw UnknownIdentifier(std::string(name), start);
    }
};

bool node_equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Node::Kind::Number: return a.number == b.number;
        case Node::Kind::ConstPi:
        case Node::Kind::ConstE: return true;
        case Node::Kind::Variable: return a.var == b.var;
        case Node::Kind::Neg: return node_equal(*a.lhs, *b.lhs);
        case Node::Kind::Call: return a.fn == b.fn && node_equal(*a.lhs, *b.lhs);
        case Node::Kind::Binary:
            return a.op == b.op && node_equal(*a.lhs, *b.lhs) && node_equal(*a.rhs, *b.rhs);
    }
    return false;
}

const char* fn_name(Fn f) {
    switch (f) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Tan: return "tan";
        case Fn::Exp: return "exp";
        case Fn::Log: return "log";
        case Fn::Sqrt: return "sqrt";
        case Fn::Sinh: return "sinh";
        case Fn::Cosh: return "cosh";
        case Fn::Tanh: return "tanh";
        case Fn::Abs: return "abs";
    }
    return "?";
}

// Precedence levels used by the printer: add/sub 1, mul/div 2, neg 3,
// pow 4, atom 5.
int level(const Node& n) {
    switch (n.kind) {
        case Node::Kind::Binary:
            switch (n.op) {
                case BinOp::Add:
                case BinOp::Sub: return 1;
                case BinOp::Mul:
                case BinOp::Div: return 2;
                case BinOp::Pow: return 4;
            }
            return 1;
        case Node::Kind::Neg: return 3;
        default: return 5;
    }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int min_level, std::string& out) {
    if (level(child) < min_level) {
        out += '(';
        print_node(child, out);
        out += ')';
    } else {
        print_node(child, out);
    }
}

void print_node(const Node& n, std::string& out) {
    switch (n.kind) {
        case Node::Kind::Number: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", n.number);
            out += buf;
            return;
        }
        case Node::Kind::ConstPi: out += "pi"; return;
        case Node::Kind::ConstE: out += "e"; return;
        case Node::Kind::Variable: out += n.var == Var::U ? 'u' : 'v'; return;
        case Node::Kind::Neg:
            out += '-';
            print_child(*n.lhs, 3, out);
            return;
        case Node::Kind::Call:
            out += fn_name(n.fn);
            out += '(';
            print_node(*n.lhs, out);
            out += ')';
            return;
        case Node::Kind::Binary: {
            switch (n.op) {
                case BinOp::Add:
                    print_child(*n.lhs, 1, out);
                    out += " + ";
                    print_child(*n.rhs, 2, out);  // a + (b + c) keeps right nesting
                    return;
                case BinOp::Sub:
                    print_child(*n.lhs, 1, out);
                    out += " - ";
                    print_child(*n.rhs, 2, out);
                    return;
                case BinOp::Mul:
                    print_child(*n.lhs, 2, out);
                    out += '*';
                    print_child(*n.rhs, 3, out);
                    return;
                case BinOp::Div:
                    print_child(*n.lhs, 2, out);
                    out += '/';
                    print_child(*n.rhs, 3, out);
                    return;
                case BinOp::Pow:
                    print_child(*n.lhs, 5, out);  // (x^y)^z and (-x)^2 need parens
                    out += '^';
                    print_child(*n.rhs, 3, out);  // right-assoc; exponent may be -k or a^b
                    return;
            }
        }
    }
}

bool node_depends(const Node& n, Var v) {
    switch (n.kind) {
        case Node::Kind::Variable: return n.var == v;
        case Node::Kind::Neg:
        case Node::Kind::Call: return node_depends(*n.lhs, v);
        case Node::Kind::Binary: return node_depends(*n.lhs, v) || node_depends(*n.rhs, v);
        default: return false;
    }
}

}  // namespace

bool Expr::operator==(const Expr& o) const {
    if (!root || !o.root) return root == o.root;
    return node_equal(*root, *o.root);
}

Expr parse(std::string_view text) {
    Parser p{text};
    if (p.at_end()) throw SyntaxError("empty expression", 0);
    NodePtr root = p.parse_expr();
    if (!p.at_end()) p.fail("trailing input after expression");
    return Expr{root};
}

std::string to_string(const Expr& e) {
    std::string out;
    print_node(*e.root, out);
    return out;
}

bool depends_on(const Expr& e, Var v) { return e.root && node_depends(*e.root, v); }

Expr expr_number(double v) { return Expr{number_node(v)}; }
Expr expr_var(Var v) { return Expr{var_node(v)}; }
Expr expr_neg(Expr a) { return Expr{neg_node(a.root)}; }
Expr expr_bin(BinOp op, Expr a, Expr b) { return Expr{bin_node(op, a.root, b.root)}; }
Expr expr_call(Fn f, Expr a) { return Expr{call_node(f, a.root)}; }

}  // namespace wagner
