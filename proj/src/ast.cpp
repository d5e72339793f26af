#include "concai/ast.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>

namespace concai {

const char* bin_op_text(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    }
    return "?";
}

namespace {

// ---------------------------------------------------------------- lexer

struct Token {
    enum class Kind {
        Ident, Int, Punct, End,
    } kind;
    std::string text;
    std::int64_t value = 0;
    SourceLoc loc;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws();
            SourceLoc loc{line_, col_};
            if (pos_ >= text_.size()) {
                out.push_back({Token::Kind::End, "", 0, loc});
                return out;
            }
            char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                    id += advance();
                out.push_back({Token::Kind::Ident, id, 0, loc});
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string num;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    num += advance();
                out.push_back({Token::Kind::Int, num, std::stoll(num), loc});
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                std::string p(1, advance());
                if ((p == "=" || p == "!" || p == "<") && pos_ < text_.size() && text_[pos_] == '=')
                    p += advance();
                if (p == "!")
                    throw ParseError(loc, "unexpected character '!'");
                static const char* valid[] = {"=", "==", "!=", "<", "<=", "+", "-", "*",
                                              "(", ")", "{", "}", ";"};
                if (std::find_if(std::begin(valid), std::end(valid),
                                 [&](const char* v) { return p == v; }) == std::end(valid))
                    throw ParseError(loc, "unexpected character '" + p + "'");
                out.push_back({Token::Kind::Punct, p, 0, loc});
            }
        }
    }

private:
    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    std::uint32_t line_ = 1, col_ = 1;
};

// ------------------------------------------------------- parse (raw names)

struct RawExpr {
    enum class Kind { IntLit, Name, Binary } kind;
    std::int64_t lit = 0;
    std::string name;
    BinOp op = BinOp::Add;
    std::unique_ptr<RawExpr> lhs, rhs;
    SourceLoc loc;
};

struct RawStmt {
    enum class Kind { Assign, Input, Create, Lock, Unlock, If, While } kind;
    SourceLoc loc;
    std::string target;             // Assign/Input/Create target; Lock/Unlock mutex
    std::string callee;             // Create thread name
    std::unique_ptr<RawExpr> expr;  // Assign rhs / condition
    std::vector<RawStmt> body, else_body;
};

struct RawThread {
    std::string name;
    std::vector<RawStmt> body;
    SourceLoc loc;
};

struct RawProgram {
    std::vector<std::string> globals;
    std::vector<SourceLoc> global_locs;
    std::vector<RawThread> threads;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    RawProgram run() {
        RawProgram p;
        while (!at_end()) {
            if (peek_ident("global")) {
                expect_ident("global");
                Token name = expect(Token::Kind::Ident, "global variable name");
                expect_punct(";");
                p.globals.push_back(name.text);
                p.global_locs.push_back(name.loc);
            } else if (peek_ident("thread")) {
                SourceLoc loc = peek().loc;
                expect_ident("thread");
                Token name = expect(Token::Kind::Ident, "thread name");
                expect_punct("{");
                RawThread t{name.text, parse_stmts(), loc};
                expect_punct("}");
                p.threads.push_back(std::move(t));
            } else {
                throw ParseError(peek().loc, "expected 'global' or 'thread' declaration");
            }
        }
        return p;
    }

private:
    std::vector<RawStmt> parse_stmts() {
        std::vector<RawStmt> out;
        while (!peek_punct("}") && !at_end()) out.push_back(parse_stmt());
        return out;
    }

    RawStmt parse_stmt() {
        Token tok = peek();
        if (tok.kind == Token::Kind::Ident &&
            (tok.text == "lock" || tok.text == "unlock")) {
            next();
            expect_punct("(");
            Token m = expect(Token::Kind::Ident, "mutex name");
            expect_punct(")");
            expect_punct(";");
            RawStmt s;
            s.kind = tok.text == "lock" ? RawStmt::Kind::Lock : RawStmt::Kind::Unlock;
            s.loc = tok.loc;
            s.target = m.text;
            return s;
        }
        if (tok.kind == Token::Kind::Ident && tok.text == "if") {
            next();
            RawStmt s;
            s.kind = RawStmt::Kind::If;
            s.loc = tok.loc;
            expect_punct("(");
            s.expr = parse_expr();
            expect_punct(")");
            s.body = parse_block();
            if (peek_ident("else")) {
                next();
                s.else_body = parse_block();
            }
            return s;
        }
        if (tok.kind == Token::Kind::Ident && tok.text == "while") {
            next();
            RawStmt s;
            s.kind = RawStmt::Kind::While;
            s.loc = tok.loc;
            expect_punct("(");
            s.expr = parse_expr();
            expect_punct(")");
            s.body = parse_block();
            return s;
        }
        // assignment forms
        Token target = expect(Token::Kind::Ident, "statement");
        expect_punct("=");
        RawStmt s;
        s.loc = target.loc;
        s.target = target.text;
        if (peek_ident("create")) {
            next();
            expect_punct("(");
            Token t = expect(Token::Kind::Ident, "thread name");
            expect_punct(")");
            s.kind = RawStmt::Kind::Create;
            s.callee = t.text;
        } else if (peek_ident("input")) {
            next();
            expect_punct("(");
            expect_punct(")");
            s.kind = RawStmt::Kind::Input;
        } else {
            s.kind = RawStmt::Kind::Assign;
            s.expr = parse_expr();
        }
        expect_punct(";");
        return s;
    }

    std::vector<RawStmt> parse_block() {
        expect_punct("{");
        auto body = parse_stmts();
        expect_punct("}");
        return body;
    }

    // expr := arith (cmpop arith)?   cmp is non-chaining
    std::unique_ptr<RawExpr> parse_expr() {
        auto lhs = parse_arith();
        for (const char* op : {"==", "!=", "<=", "<"}) {
            if (peek_punct(op)) {
                SourceLoc loc = next().loc;
                auto rhs = parse_arith();
                auto e = std::make_unique<RawExpr>();
                e->kind = RawExpr::Kind::Binary;
                e->op = op == std::string("==")   ? BinOp::Eq
                        : op == std::string("!=") ? BinOp::Ne
                        : op == std::string("<=") ? BinOp::Le
                                                  : BinOp::Lt;
                e->lhs = std::move(lhs);
                e->rhs = std::move(rhs);
                e->loc = loc;
                return e;
            }
        }
        return lhs;
    }

    std::unique_ptr<RawExpr> parse_arith() {
        auto lhs = parse_term();
        while (peek_punct("+") || peek_punct("-")) {
            Token op = next();
            auto rhs = parse_term();
            auto e = std::make_unique<RawExpr>();
            e->kind = RawExpr::Kind::Binary;
            e->op = op.text == "+" ? BinOp::Add : BinOp::Sub;
            e->lhs = std::move(lhs);
            e->rhs = std::move(rhs);
            e->loc = op.loc;
            lhs = std::move(e);
        }
        return lhs;
    }

    std::unique_ptr<RawExpr> parse_term() {
        auto lhs = parse_atom();
        while (peek_punct("*")) {
            Token op = next();
            auto rhs = parse_atom();
            auto e = std::make_unique<RawExpr>();
            e->kind = RawExpr::Kind::Binary;
            e->op = BinOp::Mul;
            e->lhs = std::move(lhs);
            e->rhs = std::move(rhs);
            e->loc = op.loc;
            lhs = std::move(e);
        }
        return lhs;
    }

    std::unique_ptr<RawExpr> parse_atom() {
        Token tok = peek();
        auto e = std::make_unique<RawExpr>();
        e->loc = tok.loc;
        if (tok.kind == Token::Kind::Int) {
            next();
            e->kind = RawExpr::Kind::IntLit;
            e->lit = tok.value;
            return e;
        }
        if (tok.kind == Token::Kind::Ident) {
            next();
            e->kind = RawExpr::Kind::Name;
            e->name = tok.text;
            return e;
        }
        if (peek_punct("-")) {
            next();
            Token num = expect(Token::Kind::Int, "integer literal");
            e->kind = RawExpr::Kind::IntLit;
            e->lit = -num.value;
            return e;
        }
        if (peek_punct("(")) {
            next();
            auto inner = parse_expr();
            expect_punct(")");
            return inner;
        }
        throw ParseError(tok.loc, "expected expression");
    }

    const Token& peek() const { return toks_[pos_]; }
    Token next() { return toks_[pos_++]; }
    bool at_end() const { return peek().kind == Token::Kind::End; }
    bool peek_punct(const char* p) const {
        return peek().kind == Token::Kind::Punct && peek().text == p;
    }
    bool peek_ident(const char* id) const {
        return peek().kind == Token::Kind::Ident && peek().text == id;
    }
    Token expect(Token::Kind k, const char* what) {
        if (peek().kind != k)
            throw ParseError(peek().loc, std::string("expected ") + what);
        return next();
    }
    void expect_punct(const char* p) {
        if (!peek_punct(p))
            throw ParseError(peek().loc, std::string("expected '") + p + "'");
        next();
    }
    void expect_ident(const char* id) {
        if (!peek_ident(id))
            throw ParseError(peek().loc, std::string("expected '") + id + "'");
        next();
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ------------------------------------------------- resolution & validation

enum class NameUse { Global, Thread, Mutex, Local };

const char* use_text(NameUse u) {
    switch (u) {
    case NameUse::Global: return "global";
    case NameUse::Thread: return "thread";
    case NameUse::Mutex: return "mutex";
    case NameUse::Local: return "local";
    }
    return "?";
}

// Unification-based int/tid type check. Node ids: one per variable plus two
// constant nodes for int and thread-id.
class TypeCheck {
public:
    TypeCheck(std::size_t n_vars)
        : parent_(n_vars + 2), int_node_(n_vars), tid_node_(n_vars + 1) {
        for (std::size_t i = 0; i < parent_.size(); ++i) parent_[i] = i;
    }

    std::size_t int_node() const { return int_node_; }
    std::size_t tid_node() const { return tid_node_; }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }

    void unify(std::size_t a, std::size_t b, SourceLoc loc, const std::string& what) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        bool a_const = a == int_node_ || a == tid_node_;
        bool b_const = b == int_node_ || b == tid_node_;
        if (a_const && b_const)
            throw ParseError(loc, "type conflict in " + what + " (int vs thread id)");
        if (a_const) std::swap(a, b);
        parent_[a] = b;
    }

private:
    std::vector<std::size_t> parent_;
    std::size_t int_node_, tid_node_;
};

class Resolver {
public:
    Program run(RawProgram raw) {
        // global variables
        for (std::size_t i = 0; i < raw.globals.size(); ++i) {
            if (!uses_.emplace(raw.globals[i], NameUse::Global).second)
                throw ParseError(raw.global_locs[i], "duplicate global '" + raw.globals[i] + "'");
            var_ids_.emplace(raw.globals[i], static_cast<VarId>(global_names_.size()));
            global_names_.push_back(raw.globals[i]);
        }
        if (global_names_.size() > GlobalSet::capacity)
            throw ParseError({}, "too many globals");

        // thread names; exactly one main
        std::optional<std::size_t> main_idx;
        for (std::size_t i = 0; i < raw.threads.size(); ++i) {
            const auto& t = raw.threads[i];
            if (thread_ids_.count(t.name))
                throw ParseError(t.loc, "duplicate thread name '" + t.name + "'");
            if (uses_.count(t.name))
                throw ParseError(t.loc, "name '" + t.name + "' already used as " +
                                            use_text(uses_.at(t.name)));
            uses_.emplace(t.name, NameUse::Thread);
            thread_ids_.emplace(t.name, i);
            if (t.name == "main") main_idx = i;
        }
        if (!main_idx)
            throw ParseError({}, "no thread named 'main'");

        // collect locals and mutexes; `self` is the first local
        add_local("self", {});
        for (const auto& t : raw.threads) scan_names(t.body);

        auto vars = std::make_shared<VarTable>();
        vars->names = global_names_;
        vars->names.insert(vars->names.end(), local_names_.begin(), local_names_.end());
        vars->n_globals = global_names_.size();
        vars->self = static_cast<VarId>(global_names_.size()); // "self" added first

        Program p;
        p.vars = vars;
        p.main_index = *main_idx;
        p.mutex_names = mutex_names_;

        TypeCheck types(vars->size());
        types.unify(vars->self, types.tid_node(), {}, "reserved variable 'self'");

        for (const auto& t : raw.threads) {
            ThreadDef def;
            def.name = t.name;
            def.loc = t.loc;
            def.body = resolve_stmts(t.body, p, types);
            p.threads.push_back(std::move(def));
        }
        return p;
    }

private:
    void add_local(const std::string& name, SourceLoc loc) {
        auto it = uses_.find(name);
        if (it != uses_.end()) {
            if (it->second != NameUse::Local)
                throw ParseError(loc, "name '" + name + "' already used as " +
                                          use_text(it->second));
            return;
        }
        uses_.emplace(name, NameUse::Local);
        var_ids_.emplace(name, static_cast<VarId>(global_names_.size() + local_names_.size()));
        local_names_.push_back(name);
    }

    void add_mutex(const std::string& name, SourceLoc loc) {
        auto it = uses_.find(name);
        if (it != uses_.end()) {
            if (it->second != NameUse::Mutex)
                throw ParseError(loc, "name '" + name + "' already used as " +
                                          use_text(it->second));
            return;
        }
        uses_.emplace(name, NameUse::Mutex);
        mutex_ids_.emplace(name, static_cast<MutexId>(mutex_names_.size()));
        mutex_names_.push_back(name);
    }

    // First pass over statements: register locals (assignment targets) and
    // mutexes so that any body may refer to locals introduced in another.
    void scan_names(const std::vector<RawStmt>& stmts) {
        for (const auto& s : stmts) {
            switch (s.kind) {
            case RawStmt::Kind::Assign:
            case RawStmt::Kind::Input:
            case RawStmt::Kind::Create:
                if (s.target == "self")
                    throw ParseError(s.loc, "assignment to reserved variable 'self'");
                if (!uses_.count(s.target) || uses_.at(s.target) == NameUse::Local)
                    add_local(s.target, s.loc);
                break;
            case RawStmt::Kind::Lock:
            case RawStmt::Kind::Unlock:
                add_mutex(s.target, s.loc);
                break;
            case RawStmt::Kind::If:
            case RawStmt::Kind::While:
                scan_names(s.body);
                scan_names(s.else_body);
                break;
            }
        }
    }

    std::vector<Stmt> resolve_stmts(const std::vector<RawStmt>& stmts, Program& p,
                                    TypeCheck& types) {
        std::vector<Stmt> out;
        for (const auto& rs : stmts) out.push_back(resolve_stmt(rs, p, types));
        return out;
    }

    Stmt resolve_stmt(const RawStmt& rs, Program& p, TypeCheck& types) {
        Stmt s;
        s.loc = rs.loc;
        switch (rs.kind) {
        case RawStmt::Kind::Lock:
        case RawStmt::Kind::Unlock:
            s.kind = rs.kind == RawStmt::Kind::Lock ? Stmt::Kind::Lock : Stmt::Kind::Unlock;
            s.mutex = mutex_ids_.at(rs.target);
            return s;
        case RawStmt::Kind::If:
        case RawStmt::Kind::While:
            s.kind = rs.kind == RawStmt::Kind::If ? Stmt::Kind::If : Stmt::Kind::While;
            s.expr = resolve_expr(*rs.expr, p, types);
            types.unify(expr_type_node(p, s.expr, types), types.int_node(), rs.expr->loc,
                        "condition");
            s.body = resolve_stmts(rs.body, p, types);
            s.else_body = resolve_stmts(rs.else_body, p, types);
            return s;
        case RawStmt::Kind::Input:
            s.kind = Stmt::Kind::Input;
            s.var = local_target(rs);
            types.unify(s.var, types.int_node(), rs.loc, "input()");
            return s;
        case RawStmt::Kind::Create: {
            s.kind = Stmt::Kind::Create;
            s.var = local_target(rs);
            auto it = thread_ids_.find(rs.callee);
            if (it == thread_ids_.end())
                throw ParseError(rs.loc, "undeclared thread '" + rs.callee + "'");
            s.thread = static_cast<std::uint32_t>(it->second);
            types.unify(s.var, types.tid_node(), rs.loc, "create()");
            return s;
        }
        case RawStmt::Kind::Assign:
            break;
        }

        // plain assignment: classify into Write / Read / Assign
        bool lhs_global = uses_.count(rs.target) && uses_.at(rs.target) == NameUse::Global;
        if (lhs_global) {
            s.kind = Stmt::Kind::Write;
            s.var = var_ids_.at(rs.target);
            const RawExpr& e = *rs.expr;
            if (e.kind == RawExpr::Kind::IntLit) {
                s.src = WriteSrc{true, e.lit, 0};
                types.unify(s.var, types.int_node(), rs.loc, "global write");
            } else if (e.kind == RawExpr::Kind::Name && is_local_name(e.name)) {
                add_local(e.name, e.loc);
                s.src = WriteSrc{false, 0, var_ids_.at(e.name)};
                types.unify(s.var, s.src.var, rs.loc, "global write");
            } else {
                throw ParseError(rs.loc,
                                 "a global may only be assigned a local or a literal; "
                                 "introduce a temporary local");
            }
            return s;
        }
        if (rs.expr->kind == RawExpr::Kind::Name && uses_.count(rs.expr->name) &&
            uses_.at(rs.expr->name) == NameUse::Global) {
            s.kind = Stmt::Kind::Read;
            s.var = local_target(rs);
            s.var2 = var_ids_.at(rs.expr->name);
            types.unify(s.var, s.var2, rs.loc, "global read");
            return s;
        }
        s.kind = Stmt::Kind::Assign;
        s.var = local_target(rs);
        s.expr = resolve_expr(*rs.expr, p, types);
        types.unify(s.var, expr_type_node(p, s.expr, types), rs.loc, "assignment");
        return s;
    }

    VarId local_target(const RawStmt& rs) {
        if (rs.target == "self")
            throw ParseError(rs.loc, "assignment to reserved variable 'self'");
        auto it = uses_.find(rs.target);
        if (it != uses_.end() && it->second != NameUse::Local)
            throw ParseError(rs.loc, "name '" + rs.target + "' already used as " +
                                         use_text(it->second));
        return var_ids_.at(rs.target);
    }

    bool is_local_name(const std::string& n) const {
        auto it = uses_.find(n);
        return it == uses_.end() || it->second == NameUse::Local;
    }

    ExprId resolve_expr(const RawExpr& re, Program& p, TypeCheck& types) {
        ExprNode n;
        n.loc = re.loc;
        switch (re.kind) {
        case RawExpr::Kind::IntLit:
            n.kind = ExprNode::Kind::IntLit;
            n.lit = re.lit;
            return p.exprs.add(n);
        case RawExpr::Kind::Name: {
            auto it = uses_.find(re.name);
            if (it != uses_.end() && it->second == NameUse::Global)
                throw ParseError(re.loc, "global '" + re.name +
                                             "' may not appear inside an expression; "
                                             "introduce a temporary local");
            if (it != uses_.end() && it->second != NameUse::Local)
                throw ParseError(re.loc, "name '" + re.name + "' already used as " +
                                             use_text(it->second));
            if (it == uses_.end())
                throw ParseError(re.loc, "undeclared variable '" + re.name + "'");
            n.kind = ExprNode::Kind::VarRef;
            n.var = var_ids_.at(re.name);
            return p.exprs.add(n);
        }
        case RawExpr::Kind::Binary: {
            n.kind = ExprNode::Kind::Binary;
            n.op = re.op;
            n.lhs = resolve_expr(*re.lhs, p, types);
            n.rhs = resolve_expr(*re.rhs, p, types);
            if (n.op == BinOp::Eq || n.op == BinOp::Ne) {
                types.unify(expr_type_node(p, n.lhs, types), expr_type_node(p, n.rhs, types),
                            re.loc, "comparison");
            } else {
                types.unify(expr_type_node(p, n.lhs, types), types.int_node(), re.loc,
                            "arithmetic");
                types.unify(expr_type_node(p, n.rhs, types), types.int_node(), re.loc,
                            "arithmetic");
            }
            return p.exprs.add(n);
        }
        }
        throw std::logic_error("unreachable");
    }

    std::size_t expr_type_node(const Program& p, ExprId id, TypeCheck& types) {
        const ExprNode& n = p.exprs.at(id);
        switch (n.kind) {
        case ExprNode::Kind::IntLit: return types.int_node();
        case ExprNode::Kind::VarRef: return n.var;
        case ExprNode::Kind::Binary: return types.int_node();
        }
        throw std::logic_error("unreachable");
    }

    std::map<std::string, NameUse> uses_;
    std::map<std::string, VarId> var_ids_;
    std::map<std::string, std::size_t> thread_ids_;
    std::map<std::string, MutexId> mutex_ids_;
    std::vector<std::string> global_names_, local_names_, mutex_names_;
};

// ----------------------------------------------------------- pretty print

class Printer {
public:
    Printer(const Program& p, bool synthetic) : p_(p), synthetic_(synthetic) {}

    std::string run() {
        for (std::size_t g = 0; g < p_.n_globals(); ++g)
            line("global " + p_.vars->name(static_cast<VarId>(g)) + ";");
        for (const auto& t : p_.threads) {
            line("thread " + t.name + " {");
            ++indent_;
            stmts(t.body);
            --indent_;
            line("}");
        }
        return out_.str();
    }

private:
    void stmts(const std::vector<Stmt>& body) {
        for (const auto& s : body) stmt(s);
    }

    void stmt(const Stmt& s) {
        if (s.synthetic && !synthetic_) return;
        switch (s.kind) {
        case Stmt::Kind::Assign:
            line(p_.var_name(s.var) + " = " + expr(s.expr) + ";");
            break;
        case Stmt::Kind::Input:
            line(p_.var_name(s.var) + " = input();");
            break;
        case Stmt::Kind::Create:
            line(p_.var_name(s.var) + " = create(" + p_.threads[s.thread].name + ");");
            break;
        case Stmt::Kind::Lock:
            line("lock(" + p_.mutex_names[s.mutex] + ");");
            break;
        case Stmt::Kind::Unlock:
            line("unlock(" + p_.mutex_names[s.mutex] + ");");
            break;
        case Stmt::Kind::Write:
            line(p_.var_name(s.var) + " = " +
                 (s.src.is_lit ? std::to_string(s.src.lit) : p_.var_name(s.src.var)) + ";");
            break;
        case Stmt::Kind::Read:
            line(p_.var_name(s.var) + " = " + p_.var_name(s.var2) + ";");
            break;
        case Stmt::Kind::If:
            line("if (" + expr(s.expr) + ") {");
            ++indent_;
            stmts(s.body);
            --indent_;
            if (s.else_body.empty()) {
                line("}");
            } else {
                line("} else {");
                ++indent_;
                stmts(s.else_body);
                --indent_;
                line("}");
            }
            break;
        case Stmt::Kind::While:
            line("while (" + expr(s.expr) + ") {");
            ++indent_;
            stmts(s.body);
            --indent_;
            line("}");
            break;
        }
    }

    std::string expr(ExprId id) const {
        const ExprNode& n = p_.exprs.at(id);
        switch (n.kind) {
        case ExprNode::Kind::IntLit: return std::to_string(n.lit);
        case ExprNode::Kind::VarRef: return p_.var_name(n.var);
        case ExprNode::Kind::Binary:
            return "(" + expr(n.lhs) + " " + bin_op_text(n.op) + " " + expr(n.rhs) + ")";
        }
        return "?";
    }

    void line(const std::string& text) {
        for (int i = 0; i < indent_; ++i) out_ << "    ";
        out_ << text << "\n";
    }

    const Program& p_;
    bool synthetic_;
    std::ostringstream out_;
    int indent_ = 0;
};

std::vector<Stmt> wrap_accesses(std::vector<Stmt> body, const Program& p,
                                std::size_t n_user_mutexes) {
    std::vector<Stmt> out;
    for (auto& s : body) {
        if (s.kind == Stmt::Kind::If || s.kind == Stmt::Kind::While) {
            s.body = wrap_accesses(std::move(s.body), p, n_user_mutexes);
            s.else_body = wrap_accesses(std::move(s.else_body), p, n_user_mutexes);
            out.push_back(std::move(s));
            continue;
        }
        if (s.kind == Stmt::Kind::Write || s.kind == Stmt::Kind::Read) {
            VarId g = s.kind == Stmt::Kind::Write ? s.var : s.var2;
            Stmt lock;
            lock.kind = Stmt::Kind::Lock;
            lock.loc = s.loc;
            lock.mutex = static_cast<MutexId>(n_user_mutexes + g);
            lock.synthetic = true;
            Stmt unlock = lock;
            unlock.kind = Stmt::Kind::Unlock;
            out.push_back(lock);
            out.push_back(std::move(s));
            out.push_back(unlock);
            continue;
        }
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace

Program parse(const std::string& text) {
    Lexer lex(text);
    Parser parser(lex.run());
    return Resolver{}.run(parser.run());
}

Program instrument_atomicity(Program p) {
    if (p.instrumented) throw std::logic_error("program already instrumented");
    for (std::size_t g = 0; g < p.n_globals(); ++g) {
        std::string reserved = "m_" + p.vars->name(static_cast<VarId>(g));
        for (const auto& n : p.mutex_names)
            if (n == reserved)
                throw ParseError({}, "mutex name '" + reserved + "' is reserved");
        for (const auto& n : p.vars->names)
            if (n == reserved)
                throw ParseError({}, "variable name '" + reserved + "' is reserved");
        for (const auto& t : p.threads)
            if (t.name == reserved)
                throw ParseError({}, "thread name '" + reserved + "' is reserved");
    }
    std::size_t n_user = p.mutex_names.size();
    if (n_user + p.n_globals() > LockSet::capacity)
        throw ParseError({}, "too many mutexes after instrumentation");
    for (std::size_t g = 0; g < p.n_globals(); ++g)
        p.mutex_names.push_back("m_" + p.vars->name(static_cast<VarId>(g)));
    for (auto& t : p.threads) t.body = wrap_accesses(std::move(t.body), p, n_user);
    p.instrumented = true;
    return p;
}

std::string pretty_print(const Program& p, bool include_synthetic) {
    return Printer(p, include_synthetic).run();
}

} // namespace concai
