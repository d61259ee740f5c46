#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace bikind::smt
{

enum class op
{
    bool_const,
    bv_const,
    var,
    // boolean
    not_,
    and_,
    or_,
    implies,
    ite, // bool or bit-vector, by width
    eq,
    ult,
    ule,
    slt,
    sle,
    // bit-vector
    bvnot,
    bvneg,
    bvand,
    bvor,
    bvxor,
    add,
    sub,
    mul,
    udiv,
    urem,
    sdiv,
    srem,
    shl,
    lshr,
    ashr,
};

const char* smtlib_name( op o );

struct node;
using term = std::shared_ptr< const node >;

// Terms form a DAG; sharing is by pointer. `width` is 0 for boolean terms.
struct node
{
    op o = op::bool_const;
    unsigned width = 0;
    std::uint64_t value = 0; // constants
    std::string name;        // var
    int step = 0;            // var
    std::vector< term > args;

    bool is_bool() const { return width == 0; }
    bool is_const() const { return o == op::bool_const || o == op::bv_const; }
};

struct var_key
{
    std::string name;
    int step = 0;

    auto operator<=>( const var_key& ) const = default;
};

std::string to_string( const var_key& k ); // "<name>@<step>"

struct var_decl
{
    std::string name;
    int step = 0;
    unsigned width = 0;

    var_key key() const { return { name, step }; }
    auto operator<=>( const var_decl& ) const = default;
};

using model = std::map< var_key, std::uint64_t >;

// Builders fold constants and drop neutral elements, nothing more.
term bool_val( bool b );
term bv_val( std::uint64_t v, unsigned width );
term var( const std::string& name, unsigned width, int step );

term mk_not( const term& a );
term mk_and( std::vector< term > args );
term mk_and( const term& a, const term& b );
term mk_or( std::vector< term > args );
term mk_or( const term& a, const term& b );
term mk_implies( const term& a, const term& b );
term mk_ite( const term& c, const term& t, const term& e );
term mk_eq( const term& a, const term& b );
term mk_ne( const term& a, const term& b );
// Any bit-vector or comparison op from `op`, one or two operands.
term mk_app( op o, const term& a, const term& b = nullptr );

// Value of `t` under `m` (booleans as 0/1). Throws std::out_of_range when a
// variable is missing from the model.
std::uint64_t evaluate( const term& t, const model& m );

// Sorted, duplicate-free.
std::vector< var_decl > free_vars( const term& t );

// Renames every `x@i` to `x@(i+shift)`.
term at_step( const term& t, int shift );

std::size_t dag_size( const term& t );

// A satisfiability question: the formula plus every symbol it is stated
// over (which may include symbols the formula does not mention).
struct query
{
    std::vector< var_decl > decls;
    term formula;
};

// SMT-LIB 2 text: set-logic, declarations, one assert, check-sat.
std::string to_smtlib( const query& q );
std::string to_smtlib( const term& t ); // the term alone, with lets

std::string constant_text( std::uint64_t v, unsigned width ); // (_ bvN w)

} // namespace bikind::smt
