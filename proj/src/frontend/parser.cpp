#include "bikind/frontend/parser.hpp"

#include "bikind/bv.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <map>
#include <optional>

namespace bikind
{

const char* to_string( error_category c )
{
    switch ( c )
    {
    case error_category::lexical: return "lexical error";
    case error_category::syntax: return "syntax error";
    case error_category::undeclared_identifier: return "undeclared identifier";
    case error_category::type_mismatch: return "type mismatch";
    case error_category::duplicate_declaration: return "duplicate declaration";
    case error_category::lowering: return "lowering error";
    }
    return "error";
}

frontend_error::frontend_error( error_category category, source_pos pos, const std::string& message )
    : std::runtime_error( std::to_string( pos.line ) + ":" + std::to_string( pos.column ) + ": " +
                          to_string( category ) + ": " + message ),
      category_( category ), pos_( pos ), message_( message )
{
}

namespace
{

enum class tok
{
    ident,
    integer,
    punct,
    end,
};

struct token
{
    tok kind = tok::end;
    std::string text;
    std::uint64_t value = 0;
    source_pos pos{};
};

class lexer
{
public:
    explicit lexer( std::string_view src ) : src_( src ) {}

    std::vector< token > run()
    {
        std::vector< token > out;
        for ( ;; )
        {
            skip_space();
            token t;
            t.pos = pos_;
            if ( at_end() )
            {
                out.push_back( t );
                return out;
            }
            const char c = peek();
            if ( std::isalpha( static_cast< unsigned char >( c ) ) || c == '_' )
            {
                t.kind = tok::ident;
                while ( !at_end() && ( std::isalnum( static_cast< unsigned char >( peek() ) ) || peek() == '_' ) )
                    t.text += get();
            }
            else if ( std::isdigit( static_cast< unsigned char >( c ) ) )
                lex_number( t );
            else
                lex_punct( t );
            out.push_back( std::move( t ) );
        }
    }

private:
    bool at_end() const { return i_ >= src_.size(); }
    char peek( std::size_t ahead = 0 ) const { return i_ + ahead < src_.size() ? src_[ i_ + ahead ] : '\0'; }

    char get()
    {
        const char c = src_[ i_++ ];
        if ( c == '\n' )
        {
            ++pos_.line;
            pos_.column = 1;
        }
        else
            ++pos_.column;
        return c;
    }

    void skip_space()
    {
        while ( !at_end() )
        {
            if ( std::isspace( static_cast< unsigned char >( peek() ) ) )
                get();
            else if ( peek() == '/' && peek( 1 ) == '/' )
                while ( !at_end() && peek() != '\n' )
                    get();
            else
                return;
        }
    }

    void lex_number( token& t )
    {
        t.kind = tok::integer;
        int base = 10;
        if ( peek() == '0' && ( peek( 1 ) == 'x' || peek( 1 ) == 'X' ) )
        {
            get();
            get();
            base = 16;
        }
        std::string digits;
        while ( !at_end() && std::isalnum( static_cast< unsigned char >( peek() ) ) )
            digits += get();
        t.text = digits;
        const auto* first = digits.data();
        const auto* last = digits.data() + digits.size();
        auto [ ptr, ec ] = std::from_chars( first, last, t.value, base );
        if ( digits.empty() || ec == std::errc::invalid_argument || ptr != last )
            throw frontend_error( error_category::lexical, t.pos, "malformed integer literal '" + digits + "'" );
        if ( ec == std::errc::result_out_of_range ||
             t.value > static_cast< std::uint64_t >( std::numeric_limits< std::int64_t >::max() ) )
            throw frontend_error( error_category::lexical, t.pos, "integer literal too large" );
    }

    void lex_punct( token& t )
    {
        static const char* const two[] = { "<<", ">>", "==", "!=", "<=", ">=", "&&", "||" };
        t.kind = tok::punct;
        for ( const char* op : two )
            if ( peek() == op[ 0 ] && peek( 1 ) == op[ 1 ] )
            {
                get();
                get();
                t.text = op;
                return;
            }
        const char c = peek();
        static const std::string_view single = "(){};:=+-*/%&|^<>!~";
        if ( single.find( c ) == std::string_view::npos )
            throw frontend_error( error_category::lexical, t.pos, std::string( "unexpected character '" ) + c + "'" );
        t.text = std::string( 1, get() );
    }

    std::string_view src_;
    std::size_t i_ = 0;
    source_pos pos_{};
};

// Untyped syntax tree produced by the parser before name resolution.
struct raw_expr
{
    enum class kind
    {
        int_lit,
        bool_lit,
        ident,
        unary,
        binary,
    } k = kind::int_lit;
    source_pos pos{};
    std::int64_t ival = 0;
    std::string name;
    unary_op uop = unary_op::neg;
    binary_op bop = binary_op::add;
    std::unique_ptr< raw_expr > lhs, rhs;
};

using raw_ptr = std::unique_ptr< raw_expr >;

class parser
{
public:
    explicit parser( std::vector< token > toks ) : toks_( std::move( toks ) ) {}

    program run()
    {
        if ( at_end() )
            throw frontend_error( error_category::syntax, cur().pos, "expected declaration or statement" );

        while ( is_word( "var" ) )
            parse_decl();
        while ( !at_end() )
        {
            if ( is_word( "var" ) )
                throw frontend_error( error_category::syntax, cur().pos, "declarations must precede statements" );
            prog_.body.push_back( parse_stmt() );
        }
        return std::move( prog_ );
    }

private:
    // --- token helpers -------------------------------------------------

    const token& cur() const { return toks_[ i_ ]; }
    bool at_end() const { return cur().kind == tok::end; }
    bool is_punct( std::string_view p ) const { return cur().kind == tok::punct && cur().text == p; }
    bool is_word( std::string_view w ) const { return cur().kind == tok::ident && cur().text == w; }

    token take() { return toks_[ i_++ ]; }

    [[noreturn]] void fail( const std::string& what ) const
    {
        std::string found = at_end() ? "end of input" : "'" + cur().text + "'";
        throw frontend_error( error_category::syntax, cur().pos, "expected " + what + ", found " + found );
    }

    void expect( std::string_view p )
    {
        if ( !is_punct( p ) )
            fail( "'" + std::string( p ) + "'" );
        take();
    }

    static bool is_keyword( std::string_view w )
    {
        static const char* const words[] = { "var",   "loop",  "while", "if",   "else", "havoc", "assert",
                                             "assume", "break", "halt", "true", "false" };
        for ( const char* k : words )
            if ( w == k )
                return true;
        return false;
    }

    token expect_ident()
    {
        if ( cur().kind != tok::ident || is_keyword( cur().text ) )
            fail( "identifier" );
        return take();
    }

    // --- declarations --------------------------------------------------

    int_type parse_type()
    {
        if ( cur().kind != tok::ident )
            fail( "type" );
        static const std::map< std::string, int_type, std::less<> > types = {
            { "u8", { 8, false } },  { "u16", { 16, false } }, { "u32", { 32, false } },
            { "i8", { 8, true } },   { "i16", { 16, true } },  { "i32", { 32, true } },
        };
        auto it = types.find( cur().text );
        if ( it == types.end() )
            fail( "type (u8, u16, u32, i8, i16, i32)" );
        take();
        return it->second;
    }

    void parse_decl()
    {
        take(); // var
        const token name = expect_ident();
        expect( ":" );
        declaration d;
        d.name = name.text;
        d.pos = name.pos;
        d.type = parse_type();
        if ( is_punct( "=" ) )
        {
            take();
            bool negative = false;
            if ( is_punct( "-" ) )
            {
                take();
                negative = true;
            }
            if ( cur().kind != tok::integer )
                fail( "integer initializer" );
            const token lit = take();
            const auto v = static_cast< std::int64_t >( lit.value ) * ( negative ? -1 : 1 );
            d.init = checked_literal( v, d.type, lit.pos );
        }
        expect( ";" );

        if ( d.name == "pc" )
            throw frontend_error( error_category::duplicate_declaration, d.pos,
                                  "'pc' is reserved for the program counter" );
        if ( vars_.contains( d.name ) )
            throw frontend_error( error_category::duplicate_declaration, d.pos,
                                  "variable '" + d.name + "' is already declared" );
        vars_.emplace( d.name, prog_.decls.size() );
        prog_.decls.push_back( std::move( d ) );
    }

    static std::uint64_t checked_literal( std::int64_t v, int_type t, source_pos pos )
    {
        std::int64_t lo = 0;
        std::int64_t hi = 0;
        if ( t.is_signed )
        {
            lo = -( std::int64_t{ 1 } << ( t.width - 1 ) );
            hi = ( std::int64_t{ 1 } << ( t.width - 1 ) ) - 1;
        }
        else
            hi = static_cast< std::int64_t >( bv::mask( t.width ) );
        if ( v < lo || v > hi )
            throw frontend_error( error_category::type_mismatch, pos,
                                  "literal " + std::to_string( v ) + " does not fit in " + to_string( t ) );
        return bv::from_signed( v, t.width );
    }

    std::size_t lookup( const std::string& name, source_pos pos ) const
    {
        auto it = vars_.find( name );
        if ( it == vars_.end() )
            throw frontend_error( error_category::undeclared_identifier, pos, "'" + name + "' is not declared" );
        return it->second;
    }

    // --- statements ----------------------------------------------------

    block parse_block()
    {
        expect( "{" );
        block b;
        while ( !is_punct( "}" ) )
        {
            if ( at_end() )
                fail( "'}'" );
            b.push_back( parse_stmt() );
        }
        take();
        return b;
    }

    expr_ptr parse_condition()
    {
        auto raw = parse_expr();
        return check_bool( *raw );
    }

    stmt_ptr parse_stmt()
    {
        auto s = std::make_shared< stmt >();
        s->pos = cur().pos;

        if ( is_word( "havoc" ) )
        {
            take();
            const token name = expect_ident();
            s->k = stmt::kind::havoc;
            s->var = lookup( name.text, name.pos );
            expect( ";" );
        }
        else if ( is_word( "assert" ) || is_word( "assume" ) )
        {
            s->k = is_word( "assert" ) ? stmt::kind::assert_ : stmt::kind::assume;
            take();
            expect( "(" );
            s->value = parse_condition();
            expect( ")" );
            expect( ";" );
        }
        else if ( is_word( "break" ) || is_word( "halt" ) )
        {
            s->k = is_word( "break" ) ? stmt::kind::break_ : stmt::kind::halt;
            take();
            expect( ";" );
        }
        else if ( is_word( "if" ) )
        {
            s->k = stmt::kind::if_;
            take();
            s->branches.push_back( { parse_condition(), parse_block() } );
            while ( is_word( "else" ) )
            {
                take();
                if ( is_word( "if" ) )
                {
                    take();
                    s->branches.push_back( { parse_condition(), parse_block() } );
                }
                else
                {
                    s->else_body = parse_block();
                    break;
                }
            }
        }
        else if ( is_word( "loop" ) )
        {
            s->k = stmt::kind::loop;
            take();
            s->body = parse_block();
        }
        else if ( is_word( "while" ) )
        {
            s->k = stmt::kind::while_;
            take();
            s->value = parse_condition();
            s->body = parse_block();
        }
        else if ( cur().kind == tok::ident && !is_keyword( cur().text ) )
        {
            const token name = take();
            s->k = stmt::kind::assign;
            s->var = lookup( name.text, name.pos );
            expect( "=" );
            auto raw = parse_expr();
            const auto& d = prog_.decls[ s->var ];
            s->value = check_int( *raw, d.type );
            expect( ";" );
        }
        else
            fail( "statement" );
        return s;
    }

    // --- expressions (C precedence) ------------------------------------

    struct level
    {
        std::vector< std::pair< const char*, binary_op > > ops;
    };

    static const std::vector< level >& levels()
    {
        static const std::vector< level > l = {
            { { { "||", binary_op::lor } } },
            { { { "&&", binary_op::land } } },
            { { { "|", binary_op::bor } } },
            { { { "^", binary_op::bxor } } },
            { { { "&", binary_op::band } } },
            { { { "==", binary_op::eq }, { "!=", binary_op::ne } } },
            { { { "<", binary_op::lt }, { "<=", binary_op::le }, { ">", binary_op::gt }, { ">=", binary_op::ge } } },
            { { { "<<", binary_op::shl }, { ">>", binary_op::shr } } },
            { { { "+", binary_op::add }, { "-", binary_op::sub } } },
            { { { "*", binary_op::mul }, { "/", binary_op::div }, { "%", binary_op::mod } } },
        };
        return l;
    }

    raw_ptr parse_expr( std::size_t lvl = 0 )
    {
        if ( lvl == levels().size() )
            return parse_unary();
        auto lhs = parse_expr( lvl + 1 );
        for ( ;; )
        {
            std::optional< binary_op > op;
            for ( const auto& [ text, bop ] : levels()[ lvl ].ops )
                if ( is_punct( text ) )
                    op = bop;
            if ( !op )
                return lhs;
            const source_pos pos = cur().pos;
            take();
            auto node = std::make_unique< raw_expr >();
            node->k = raw_expr::kind::binary;
            node->pos = pos;
            node->bop = *op;
            node->lhs = std::move( lhs );
            node->rhs = parse_expr( lvl + 1 );
            lhs = std::move( node );
        }
    }

    raw_ptr parse_unary()
    {
        const source_pos pos = cur().pos;
        std::optional< unary_op > op;
        if ( is_punct( "-" ) )
            op = unary_op::neg;
        else if ( is_punct( "~" ) )
            op = unary_op::bnot;
        else if ( is_punct( "!" ) )
            op = unary_op::lnot;
        if ( !op )
            return parse_primary();
        take();
        auto operand = parse_unary();
        if ( *op == unary_op::neg && operand->k == raw_expr::kind::int_lit )
        {
            operand->ival = -operand->ival;
            operand->pos = pos;
            return operand;
        }
        auto node = std::make_unique< raw_expr >();
        node->k = raw_expr::kind::unary;
        node->pos = pos;
        node->uop = *op;
        node->lhs = std::move( operand );
        return node;
    }

    raw_ptr parse_primary()
    {
        auto node = std::make_unique< raw_expr >();
        node->pos = cur().pos;
        if ( cur().kind == tok::integer )
        {
            node->k = raw_expr::kind::int_lit;
            node->ival = static_cast< std::int64_t >( take().value );
        }
        else if ( is_word( "true" ) || is_word( "false" ) )
        {
            node->k = raw_expr::kind::bool_lit;
            node->ival = take().text == "true" ? 1 : 0;
        }
        else if ( cur().kind == tok::ident && !is_keyword( cur().text ) )
        {
            node->k = raw_expr::kind::ident;
            node->name = take().text;
        }
        else if ( is_punct( "(" ) )
        {
            take();
            node = parse_expr();
            expect( ")" );
        }
        else
            fail( "expression" );
        return node;
    }

    // --- type checking -------------------------------------------------

    // Classification of a raw expression: boolean, integer of a known type,
    // or an integer built only from literals whose type comes from context.
    struct shape
    {
        enum class kind
        {
            boolean,
            integer,
            untyped,
        } k;
        int_type t{};
    };

    [[noreturn]] static void mismatch( source_pos pos, const std::string& msg )
    {
        throw frontend_error( error_category::type_mismatch, pos, msg );
    }

    shape classify( const raw_expr& e ) const
    {
        using K = shape::kind;
        switch ( e.k )
        {
        case raw_expr::kind::int_lit:
            return { K::untyped };
        case raw_expr::kind::bool_lit:
            return { K::boolean };
        case raw_expr::kind::ident:
            return { K::integer, prog_.decls[ lookup( e.name, e.pos ) ].type };
        case raw_expr::kind::unary:
        {
            const shape s = classify( *e.lhs );
            if ( e.uop == unary_op::lnot )
            {
                if ( s.k != K::boolean )
                    mismatch( e.pos, "operand of '!' must be boolean" );
                return s;
            }
            if ( s.k == K::boolean )
                mismatch( e.pos, std::string( "operand of '" ) + to_string( e.uop ) + "' must be an integer" );
            return s;
        }
        case raw_expr::kind::binary:
        {
            const shape l = classify( *e.lhs );
            const shape r = classify( *e.rhs );
            if ( is_logical( e.bop ) )
            {
                if ( l.k != K::boolean || r.k != K::boolean )
                    mismatch( e.pos, std::string( "operands of '" ) + to_string( e.bop ) + "' must be boolean" );
                return { K::boolean };
            }
            if ( l.k == K::boolean || r.k == K::boolean )
                mismatch( e.pos, std::string( "operands of '" ) + to_string( e.bop ) + "' must be integers" );
            if ( l.k == K::integer && r.k == K::integer && l.t != r.t )
                mismatch( e.pos, std::string( "operands of '" ) + to_string( e.bop ) + "' have different types " +
                                     to_string( l.t ) + " and " + to_string( r.t ) );
            if ( is_comparison( e.bop ) )
                return { K::boolean };
            if ( l.k == K::integer )
                return l;
            return r;
        }
        }
        return { K::untyped };
    }

    expr_ptr check_bool( const raw_expr& e ) const
    {
        if ( classify( e ).k != shape::kind::boolean )
            mismatch( e.pos, "condition must be boolean" );
        return build( e, std::nullopt );
    }

    expr_ptr check_int( const raw_expr& e, int_type target ) const
    {
        const shape s = classify( e );
        if ( s.k == shape::kind::boolean )
            mismatch( e.pos, "expected an integer of type " + to_string( target ) + ", found a boolean" );
        if ( s.k == shape::kind::integer && s.t != target )
            mismatch( e.pos, "expected " + to_string( target ) + ", found " + to_string( s.t ) );
        return build( e, target );
    }

    // Builds the typed tree. `hint` types literal-only integer subtrees.
    expr_ptr build( const raw_expr& e, std::optional< int_type > hint ) const
    {
        auto out = std::make_shared< expr >();
        out->pos = e.pos;
        switch ( e.k )
        {
        case raw_expr::kind::int_lit:
        {
            const int_type t = hint.value_or( int_type{ 32, true } );
            out->k = expr::kind::int_lit;
            out->type = t;
            out->value = checked_literal( e.ival, t, e.pos );
            return out;
        }
        case raw_expr::kind::bool_lit:
            out->k = expr::kind::bool_lit;
            out->value = static_cast< std::uint64_t >( e.ival );
            return out;
        case raw_expr::kind::ident:
        {
            out->k = expr::kind::var;
            out->var = lookup( e.name, e.pos );
            out->name = e.name;
            out->type = prog_.decls[ out->var ].type;
            return out;
        }
        case raw_expr::kind::unary:
        {
            out->k = expr::kind::unary;
            out->uop = e.uop;
            out->lhs = build( *e.lhs, e.uop == unary_op::lnot ? std::nullopt : hint );
            out->type = out->lhs->type;
            return out;
        }
        case raw_expr::kind::binary:
        {
            out->k = expr::kind::binary;
            out->bop = e.bop;
            if ( is_logical( e.bop ) )
            {
                out->lhs = build( *e.lhs, std::nullopt );
                out->rhs = build( *e.rhs, std::nullopt );
                return out;
            }
            const shape l = classify( *e.lhs );
            const shape r = classify( *e.rhs );
            std::optional< int_type > t = hint;
            if ( l.k == shape::kind::integer )
                t = l.t;
            else if ( r.k == shape::kind::integer )
                t = r.t;
            else if ( is_comparison( e.bop ) )
                t = int_type{ 32, true };
            if ( !t )
                t = int_type{ 32, true };
            out->lhs = build( *e.lhs, t );
            out->rhs = build( *e.rhs, t );
            if ( !is_comparison( e.bop ) )
                out->type = t;
            return out;
        }
        }
        return out;
    }

    std::vector< token > toks_;
    std::size_t i_ = 0;
    program prog_;
    std::map< std::string, std::size_t, std::less<> > vars_;
};

} // namespace

program parse( std::string_view source )
{
    return parser( lexer( source ).run() ).run();
}

} // namespace bikind
