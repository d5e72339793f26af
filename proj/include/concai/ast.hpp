#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "concai/abstract_env.hpp"
#include "concai/small_set.hpp"

namespace concai {

struct SourceLoc {
    std::uint32_t line = 0;
    std::uint32_t col = 0;
    std::string to_string() const { return std::to_string(line) + ":" + std::to_string(col); }
};

class ParseError : public std::runtime_error {
public:
    ParseError(SourceLoc loc, const std::string& msg)
        : std::runtime_error(loc.to_string() + ": " + msg), loc(loc) {}
    SourceLoc loc;
};

enum class BinOp : std::uint8_t { Add, Sub, Mul, Eq, Ne, Lt, Le };

const char* bin_op_text(BinOp op);

using ExprId = std::uint32_t;

struct ExprNode {
    enum class Kind : std::uint8_t { IntLit, VarRef, Binary } kind;
    std::int64_t lit = 0; // IntLit
    VarId var = 0;        // VarRef
    BinOp op = BinOp::Add;
    ExprId lhs = 0, rhs = 0; // Binary
    SourceLoc loc;
};

struct ExprPool {
    std::vector<ExprNode> nodes;
    const ExprNode& at(ExprId id) const { return nodes.at(id); }
    ExprId add(ExprNode n) {
        nodes.push_back(std::move(n));
        return static_cast<ExprId>(nodes.size() - 1);
    }
};

/// Source operand of a global write: a local variable or an integer literal.
struct WriteSrc {
    bool is_lit = false;
    std::int64_t lit = 0;
    VarId var = 0;
};

struct Stmt {
    enum class Kind : std::uint8_t {
        Assign, // x = expr
        Input,  // x = input()
        Create, // x = create(thread)
        Lock,
        Unlock,
        Write, // g = local-or-literal
        Read,  // x = g
        If,
        While,
    };
    Kind kind = Kind::Assign;
    SourceLoc loc;
    VarId var = 0;            // Assign/Input/Create/Read target; Write global
    ExprId expr = 0;          // Assign rhs; If/While condition
    std::uint32_t thread = 0; // Create target thread index
    MutexId mutex = 0;        // Lock/Unlock
    VarId var2 = 0;           // Read source global
    WriteSrc src;             // Write source
    bool synthetic = false;   // inserted by atomicity instrumentation
    std::vector<Stmt> body, else_body;
};

struct ThreadDef {
    std::string name;
    std::vector<Stmt> body;
    SourceLoc loc;
};

/// A parsed and validated program. Variable ids index the shared VarTable
/// (globals first, then locals; `self` is always a local). Mutex ids index
/// mutex_names; instrumentation appends one dedicated mutex per global.
struct Program {
    std::shared_ptr<const VarTable> vars;
    std::vector<ThreadDef> threads;
    std::size_t main_index = 0;
    std::vector<std::string> mutex_names;
    ExprPool exprs;
    bool instrumented = false;

    std::size_t n_globals() const { return vars->n_globals; }
    const std::string& var_name(VarId v) const { return vars->name(v); }
};

/// Parse and validate a program text. Throws ParseError with a source
/// location on syntax errors, duplicate threads, undeclared names,
/// assignments to `self`, mixed global/local forms, and type conflicts.
Program parse(const std::string& text);

/// Wrap every global access in lock/unlock of the global's dedicated mutex.
/// Fails if user code mentions any reserved m_<global> name.
Program instrument_atomicity(Program p);

/// Render back to source text. Statements inserted by instrumentation are
/// skipped unless include_synthetic is set.
std::string pretty_print(const Program& p, bool include_synthetic = false);

} // namespace concai
