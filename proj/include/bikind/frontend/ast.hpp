#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bikind
{

struct source_pos
{
    int line = 1;
    int column = 1;
};

struct int_type
{
    unsigned width = 32;
    bool is_signed = false;

    friend bool operator==( const int_type&, const int_type& ) = default;
};

std::string to_string( int_type t );

enum class unary_op
{
    neg,  // -
    bnot, // ~
    lnot, // !
};

enum class binary_op
{
    add, sub, mul, div, mod,
    band, bor, bxor, shl, shr,
    eq, ne, lt, le, gt, ge,
    land, lor,
};

const char* to_string( unary_op op );
const char* to_string( binary_op op );

bool is_comparison( binary_op op );
bool is_logical( binary_op op );

struct expr;
using expr_ptr = std::shared_ptr< const expr >;

// A typed expression. `type` is empty for boolean-valued expressions.
struct expr
{
    enum class kind
    {
        int_lit,
        bool_lit,
        var,
        unary,
        binary,
    };

    kind k = kind::int_lit;
    source_pos pos{};
    std::optional< int_type > type;

    // int_lit: the bit pattern of the literal in `type`; bool_lit: 0 or 1.
    std::uint64_t value = 0;

    // var
    std::size_t var = 0;
    std::string name;

    unary_op uop = unary_op::neg;
    binary_op bop = binary_op::add;
    expr_ptr lhs;
    expr_ptr rhs;

    bool is_bool() const { return !type.has_value(); }
};

// Programmatic constructors used by lowering and tests. They assume the
// operands are already well-typed.
expr_ptr make_bool( bool b );
expr_ptr make_int( std::uint64_t bits, int_type t );
expr_ptr make_var( std::size_t index, std::string name, int_type t );
expr_ptr make_unary( unary_op op, expr_ptr e );
expr_ptr make_binary( binary_op op, expr_ptr l, expr_ptr r );
expr_ptr make_not( expr_ptr e );
expr_ptr make_and( expr_ptr l, expr_ptr r );

struct stmt;
using stmt_ptr = std::shared_ptr< const stmt >;
using block = std::vector< stmt_ptr >;

struct stmt
{
    enum class kind
    {
        assign,
        havoc,
        assert_,
        assume,
        break_,
        halt,
        if_,
        loop,
        while_,
    };

    struct branch
    {
        expr_ptr cond;
        block body;
    };

    kind k = kind::halt;
    source_pos pos{};

    std::size_t var = 0; // assign, havoc
    expr_ptr value;      // assign value; assert/assume/while condition

    std::vector< branch > branches; // if / else if chain
    std::optional< block > else_body;

    block body; // loop, while
};

struct declaration
{
    std::string name;
    int_type type;
    std::optional< std::uint64_t > init; // bit pattern
    source_pos pos{};
};

struct program
{
    std::vector< declaration > decls;
    block body;
};

std::string to_string( const expr& e );

// Renders a program back to source text that parses to the same structure.
std::string to_source( const program& p );

bool same_structure( const program& a, const program& b );

} // namespace bikind
