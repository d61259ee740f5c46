#pragma once

#include "bikind/cli/cli.hpp"
#include "bikind/frontend/parser.hpp"
#include "bikind/oracle/oracle.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace bikind::test
{

inline std::filesystem::path fixture_path( const std::string& name )
{
    return std::filesystem::path( BIKIND_FIXTURE_DIR ) / name;
}

inline cfg load_fixture( const std::string& name ) { return cli::load_program( fixture_path( name ) ); }

inline std::vector< cli::manifest_row > manifest() { return cli::read_manifest( fixture_path( "manifest.csv" ) ); }

// Empty when no z3 was found at configure time.
inline std::string z3_command()
{
    const std::string path = BIKIND_Z3;
    return path.empty() ? "" : "cmd:" + path + " -in";
}

// Oracle limits that make every bundled fixture explorable: the u32 event
// loops only compare their input against constants up to 6.
inline oracle::bfs_limits limits_for( const cfg& g )
{
    oracle::bfs_limits l;
    for ( const auto& in : g.inputs )
        if ( g.vars[ in.var ].type.width > 16 )
            l.inputs.range = std::pair< std::uint64_t, std::uint64_t >{ 0, 6 };
    return l;
}

// Every loop-head state reachable within the oracle's input domain.
inline std::vector< oracle::concrete_state > reachable_heads( const cfg& g )
{
    const auto dom = limits_for( g ).inputs;
    std::vector< oracle::concrete_state > frontier = oracle::initial_states( g, dom );
    std::set< oracle::concrete_state > seen( frontier.begin(), frontier.end() );
    std::vector< oracle::concrete_state > heads;
    while ( !frontier.empty() )
    {
        const auto s = frontier.back();
        frontier.pop_back();
        if ( g.is_loop_head( s.pc ) )
            heads.push_back( s );
        for ( const auto& step : oracle::macro_successors( s, g, dom ) )
            if ( seen.insert( step.to ).second )
                frontier.push_back( step.to );
        if ( seen.size() > ( std::size_t{ 1 } << 20 ) )
            throw std::runtime_error( "state space too large" );
    }
    return heads;
}

inline smt::model as_model( const oracle::concrete_state& s, const transition_system& ts )
{
    smt::model m{ { { "pc", 0 }, s.pc } };
    for ( std::size_t v = 1; v < ts.state_vars.size(); ++v )
        m[ { ts.state_vars[ v ].name, 0 } ] = s.values[ v - 1 ];
    return m;
}

// Guard expressions as solver terms over step 0, written independently of
// the transition-system compiler.
inline smt::term to_term( const expr& e, const cfg& g )
{
    using smt::op;
    switch ( e.k )
    {
    case expr::kind::bool_lit: return smt::bool_val( e.value != 0 );
    case expr::kind::int_lit: return smt::bv_val( e.value, e.type->width );
    case expr::kind::var: return smt::var( g.vars[ e.var ].name, g.vars[ e.var ].type.width, 0 );
    case expr::kind::unary:
    {
        const auto a = to_term( *e.lhs, g );
        switch ( e.uop )
        {
        case unary_op::neg: return smt::mk_app( op::bvneg, a );
        case unary_op::bnot: return smt::mk_app( op::bvnot, a );
        case unary_op::lnot: return smt::mk_not( a );
        }
        break;
    }
    case expr::kind::binary:
    {
        const auto a = to_term( *e.lhs, g );
        const auto b = to_term( *e.rhs, g );
        const bool sgn = e.lhs->type && e.lhs->type->is_signed;
        switch ( e.bop )
        {
        case binary_op::add: return smt::mk_app( op::add, a, b );
        case binary_op::sub: return smt::mk_app( op::sub, a, b );
        case binary_op::mul: return smt::mk_app( op::mul, a, b );
        case binary_op::div: return smt::mk_app( sgn ? op::sdiv : op::udiv, a, b );
        case binary_op::mod: return smt::mk_app( sgn ? op::srem : op::urem, a, b );
        case binary_op::band: return smt::mk_app( op::bvand, a, b );
        case binary_op::bor: return smt::mk_app( op::bvor, a, b );
        case binary_op::bxor: return smt::mk_app( op::bvxor, a, b );
        case binary_op::shl: return smt::mk_app( op::shl, a, b );
        case binary_op::shr: return smt::mk_app( sgn ? op::ashr : op::lshr, a, b );
        case binary_op::eq: return smt::mk_eq( a, b );
        case binary_op::ne: return smt::mk_ne( a, b );
        case binary_op::lt: return smt::mk_app( sgn ? op::slt : op::ult, a, b );
        case binary_op::le: return smt::mk_app( sgn ? op::sle : op::ule, a, b );
        case binary_op::gt: return smt::mk_app( sgn ? op::slt : op::ult, b, a );
        case binary_op::ge: return smt::mk_app( sgn ? op::sle : op::ule, b, a );
        case binary_op::land: return smt::mk_and( a, b );
        case binary_op::lor: return smt::mk_or( a, b );
        }
        break;
    }
    }
    throw std::logic_error( "unhandled expression" );
}

// Random well-typed programs. All variables share one type so that any two
// expressions can be combined.
class program_generator
{
public:
    explicit program_generator( unsigned seed ) : rng_( seed ) {}

    std::string generate()
    {
        static const char* types[] = { "u8", "i8", "u16" };
        type_ = types[ pick( 3 ) ];
        vars_ = 1 + pick( 3 );
        std::ostringstream out;
        for ( int v = 0; v < vars_; ++v )
        {
            out << "var v" << v << ": " << type_;
            if ( pick( 2 ) )
                out << " = " << pick( 100 );
            out << ";\n";
        }
        loops_ = 0;
        block( out, 0, 2 + pick( 5 ) );
        return out.str();
    }

private:
    int pick( int n ) { return std::uniform_int_distribution< int >( 0, n - 1 )( rng_ ); }

    std::string var() { return "v" + std::to_string( pick( vars_ ) ); }

    std::string arith( int depth )
    {
        if ( depth == 0 || pick( 3 ) == 0 )
            return pick( 2 ) ? var() : std::to_string( pick( 20 ) );
        static const char* ops[] = { "+", "-", "*", "&", "|", "^", "/", "%", "<<", ">>" };
        const int o = pick( 10 );
        if ( pick( 8 ) == 0 )
        {
            // A negated bare literal is a negative literal, which an unsigned
            // type rejects.
            auto operand = arith( depth - 1 );
            if ( std::isdigit( static_cast< unsigned char >( operand[ 0 ] ) ) )
                operand = "(" + var() + " + " + operand + ")";
            return "(-" + operand + ")";
        }
        if ( pick( 8 ) == 0 )
            return "(~" + arith( depth - 1 ) + ")";
        return "(" + arith( depth - 1 ) + " " + ops[ o ] + " " + arith( depth - 1 ) + ")";
    }

    std::string cond( int depth )
    {
        static const char* cmp[] = { "==", "!=", "<", "<=", ">", ">=" };
        if ( depth == 0 || pick( 2 ) == 0 )
            return "(" + arith( 2 ) + " " + cmp[ pick( 6 ) ] + " " + arith( 2 ) + ")";
        switch ( pick( 4 ) )
        {
        case 0: return "!" + cond( depth - 1 );
        case 1: return "(" + cond( depth - 1 ) + " && " + cond( depth - 1 ) + ")";
        case 2: return "(" + cond( depth - 1 ) + " || " + cond( depth - 1 ) + ")";
        default: return pick( 2 ) ? "true" : "false";
        }
    }

    void block( std::ostringstream& out, int depth, int len )
    {
        const std::string ind( 4 * depth, ' ' );
        for ( int i = 0; i < len; ++i )
        {
            const int choice = depth >= 3 ? pick( 5 ) : pick( 10 );
            switch ( choice )
            {
            case 0:
            case 1: out << ind << var() << " = " << arith( 3 ) << ";\n"; break;
            case 2: out << ind << "havoc " << var() << ";\n"; break;
            case 3: out << ind << "assert(" << cond( 2 ) << ");\n"; break;
            case 4:
                if ( loops_ > 0 && pick( 3 ) == 0 )
                    out << ind << "break;\n";
                else if ( pick( 4 ) == 0 )
                    out << ind << "halt;\n";
                else
                    out << ind << "assume(" << cond( 1 ) << ");\n";
                break;
            case 5:
            case 6:
            {
                out << ind << "if (" << cond( 2 ) << ") {\n";
                block( out, depth + 1, 1 + pick( 3 ) );
                for ( int e = pick( 3 ); e > 0; --e )
                {
                    out << ind << "} else if (" << cond( 2 ) << ") {\n";
                    block( out, depth + 1, 1 + pick( 2 ) );
                }
                if ( pick( 2 ) )
                {
                    out << ind << "} else {\n";
                    block( out, depth + 1, 1 + pick( 2 ) );
                }
                out << ind << "}\n";
                break;
            }
            case 7:
            case 8:
                ++loops_;
                out << ind << "while (" << cond( 1 ) << ") {\n";
                block( out, depth + 1, 1 + pick( 3 ) );
                out << ind << "}\n";
                --loops_;
                break;
            default:
                ++loops_;
                out << ind << "loop {\n";
                block( out, depth + 1, 1 + pick( 3 ) );
                out << ind << "    break;\n" << ind << "}\n";
                --loops_;
                break;
            }
        }
    }

    std::mt19937 rng_;
    std::string type_;
    int vars_ = 1;
    int loops_ = 0;
};

// Random bit-vector formulas: boolean structure over comparisons of small
// arithmetic terms.
class formula_generator
{
public:
    formula_generator( unsigned seed, unsigned width, int vars ) : rng_( seed ), width_( width ), vars_( vars ) {}

    smt::query generate()
    {
        smt::query q;
        q.formula = boolean( 2 );
        q.decls = smt::free_vars( q.formula );
        return q;
    }

private:
    int pick( int n ) { return std::uniform_int_distribution< int >( 0, n - 1 )( rng_ ); }

    smt::term term( int depth )
    {
        using smt::op;
        if ( depth == 0 || pick( 3 ) == 0 )
        {
            if ( pick( 3 ) == 0 )
                return smt::bv_val( rng_(), width_ );
            return smt::var( "v" + std::to_string( pick( vars_ ) ), width_, 0 );
        }
        static const op binary[] = { op::add, op::sub,  op::mul,  op::udiv,  op::urem, op::sdiv, op::srem,
                                     op::shl, op::lshr, op::ashr, op::bvand, op::bvor, op::bvxor };
        switch ( pick( 8 ) )
        {
        case 0: return smt::mk_app( pick( 2 ) ? op::bvnot : op::bvneg, term( depth - 1 ) );
        case 1: return smt::mk_ite( atom( depth - 1 ), term( depth - 1 ), term( depth - 1 ) );
        default: return smt::mk_app( binary[ pick( 13 ) ], term( depth - 1 ), term( depth - 1 ) );
        }
    }

    smt::term atom( int depth )
    {
        using smt::op;
        static const op preds[] = { op::eq, op::ult, op::ule, op::slt, op::sle };
        const op p = preds[ pick( 5 ) ];
        return p == op::eq ? smt::mk_eq( term( depth ), term( depth ) ) : smt::mk_app( p, term( depth ), term( depth ) );
    }

    smt::term boolean( int depth )
    {
        if ( depth == 0 || pick( 3 ) == 0 )
            return pick( 6 ) ? atom( 2 ) : smt::mk_not( atom( 2 ) );
        std::vector< smt::term > args;
        for ( int i = 1 + pick( 3 ); i > 0; --i )
            args.push_back( boolean( depth - 1 ) );
        switch ( pick( 4 ) )
        {
        case 0: return smt::mk_or( args );
        case 1: return smt::mk_not( smt::mk_and( args ) );
        case 2: return smt::mk_implies( args.front(), args.back() );
        default: return smt::mk_and( args );
        }
    }

    std::mt19937 rng_;
    unsigned width_;
    int vars_;
};

} // namespace bikind::test
