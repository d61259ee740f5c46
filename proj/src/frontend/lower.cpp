#include "bikind/frontend/cfg.hpp"
#include "bikind/frontend/parser.hpp"

#include <algorithm>
#include <sstream>

namespace bikind
{

bool cfg::is_loop_head( location l ) const
{
    return std::find( loop_heads.begin(), loop_heads.end(), l ) != loop_heads.end();
}

bool cfg::is_cutpoint( location l ) const
{
    return l == entry || l == exit || l == error || is_loop_head( l );
}

std::string cfg::location_name( location l ) const
{
    switch ( l )
    {
    case entry: return "entry";
    case exit: return "exit";
    case error: return "error";
    default: return "L" + std::to_string( l );
    }
}

namespace
{

class lowerer
{
public:
    explicit lowerer( const program& p ) : prog_( p )
    {
        for ( const auto& d : p.decls )
            g_.vars.push_back( { d.name, d.type, d.init } );
    }

    cfg run()
    {
        const location end = lower_block( prog_.body, cfg::entry );
        add_edge( end, cfg::exit, make_bool( true ) );
        reset_dead_at_loop_heads();
        g_.out.assign( g_.num_locations, {} );
        for ( std::size_t i = 0; i < g_.edges.size(); ++i )
            g_.out[ g_.edges[ i ].from ].push_back( i );
        return std::move( g_ );
    }

private:
    location fresh() { return static_cast< location >( g_.num_locations++ ); }

    void add_edge( location from, location to, expr_ptr guard, std::vector< update > ups = {},
                   edge_kind kind = edge_kind::plain )
    {
        g_.edges.push_back( { from, to, std::move( guard ), std::move( ups ), kind } );
    }

    static void collect_divisors( const expr_ptr& e, std::vector< expr_ptr >& out )
    {
        if ( !e )
            return;
        collect_divisors( e->lhs, out );
        collect_divisors( e->rhs, out );
        if ( e->k == expr::kind::binary && ( e->bop == binary_op::div || e->bop == binary_op::mod ) )
            out.push_back( e->rhs );
    }

    // Lowers `assert(d != 0)` for every divisor in `e`.
    location guard_divisions( const expr_ptr& e, location cur )
    {
        std::vector< expr_ptr > divisors;
        collect_divisors( e, divisors );
        for ( const auto& d : divisors )
        {
            const auto zero = make_int( 0, *d->type );
            const location next = fresh();
            add_edge( cur, next, make_binary( binary_op::ne, d, zero ), {}, edge_kind::assert_pass );
            add_edge( cur, cfg::error, make_binary( binary_op::eq, d, zero ), {}, edge_kind::assert_fail );
            cur = next;
        }
        return cur;
    }

    location lower_block( const block& b, location cur )
    {
        for ( const auto& s : b )
            cur = lower_stmt( *s, cur );
        return cur;
    }

    location lower_loop( const expr_ptr& cond, const block& body, location cur )
    {
        const location head = fresh();
        const location after = fresh();
        add_edge( cur, head, make_bool( true ) );
        g_.loop_heads.push_back( head );

        location start = head;
        if ( cond )
        {
            const location test = guard_divisions( cond, head );
            start = fresh();
            add_edge( test, start, cond );
            add_edge( test, after, make_not( cond ) );
        }
        breaks_.push_back( after );
        const location end = lower_block( body, start );
        breaks_.pop_back();
        add_edge( end, head, make_bool( true ) );
        return after;
    }

    location lower_stmt( const stmt& s, location cur )
    {
        switch ( s.k )
        {
        case stmt::kind::assign:
        {
            cur = guard_divisions( s.value, cur );
            const location next = fresh();
            add_edge( cur, next, make_bool( true ), { update{ s.var, s.value, std::nullopt } } );
            return next;
        }
        case stmt::kind::havoc:
        {
            const std::size_t id = g_.inputs.size();
            g_.inputs.push_back( { s.var, "havoc." + g_.vars[ s.var ].name + "." + std::to_string( id ) } );
            const location next = fresh();
            add_edge( cur, next, make_bool( true ), { update{ s.var, nullptr, id } } );
            return next;
        }
        case stmt::kind::assert_:
        {
            cur = guard_divisions( s.value, cur );
            const location next = fresh();
            add_edge( cur, next, s.value, {}, edge_kind::assert_pass );
            add_edge( cur, cfg::error, make_not( s.value ), {}, edge_kind::assert_fail );
            return next;
        }
        case stmt::kind::assume:
        {
            cur = guard_divisions( s.value, cur );
            const location next = fresh();
            add_edge( cur, next, s.value, {}, edge_kind::assume );
            return next;
        }
        case stmt::kind::break_:
            if ( breaks_.empty() )
                throw frontend_error( error_category::lowering, s.pos, "'break' outside of a loop" );
            add_edge( cur, breaks_.back(), make_bool( true ) );
            return fresh();
        case stmt::kind::halt:
            add_edge( cur, cfg::exit, make_bool( true ) );
            return fresh();
        case stmt::kind::if_:
        {
            const location join = fresh();
            for ( const auto& br : s.branches )
            {
                cur = guard_divisions( br.cond, cur );
                const location then_start = fresh();
                const location otherwise = fresh();
                add_edge( cur, then_start, br.cond );
                add_edge( cur, otherwise, make_not( br.cond ) );
                add_edge( lower_block( br.body, then_start ), join, make_bool( true ) );
                cur = otherwise;
            }
            if ( s.else_body )
                cur = lower_block( *s.else_body, cur );
            add_edge( cur, join, make_bool( true ) );
            return join;
        }
        case stmt::kind::loop:
            return lower_loop( nullptr, s.body, cur );
        case stmt::kind::while_:
            return lower_loop( s.value, s.body, cur );
        }
        return cur;
    }

    static void collect_uses( const expr_ptr& e, std::vector< bool >& used )
    {
        if ( !e )
            return;
        if ( e->k == expr::kind::var )
            used[ e->var ] = true;
        collect_uses( e->lhs, used );
        collect_uses( e->rhs, used );
    }

    void reset_dead_at_loop_heads()
    {
        const std::size_t n = g_.vars.size();
        std::vector< std::vector< bool > > live( g_.num_locations, std::vector< bool >( n, false ) );

        bool changed = true;
        while ( changed )
        {
            changed = false;
            for ( auto it = g_.edges.rbegin(); it != g_.edges.rend(); ++it )
            {
                const edge& e = *it;
                std::vector< bool > in = live[ e.to ];
                for ( const auto& u : e.updates )
                    in[ u.var ] = false;
                collect_uses( e.guard, in );
                for ( const auto& u : e.updates )
                    collect_uses( u.value, in );
                for ( std::size_t v = 0; v < n; ++v )
                    if ( in[ v ] && !live[ e.from ][ v ] )
                    {
                        live[ e.from ][ v ] = true;
                        changed = true;
                    }
            }
        }

        for ( auto head : g_.loop_heads )
        {
            auto& dead = g_.reset_at_head.emplace_back();
            for ( std::size_t v = 0; v < n; ++v )
                if ( !live[ head ][ v ] )
                    dead.push_back( v );
        }

        for ( auto& e : g_.edges )
        {
            if ( !g_.is_loop_head( e.to ) )
                continue;
            for ( std::size_t v = 0; v < n; ++v )
            {
                if ( live[ e.to ][ v ] )
                    continue;
                update reset{ v, make_int( 0, g_.vars[ v ].type ), std::nullopt };
                auto existing = std::find_if( e.updates.begin(), e.updates.end(),
                                              [ v ]( const update& u ) { return u.var == v; } );
                if ( existing != e.updates.end() )
                    *existing = std::move( reset );
                else
                    e.updates.push_back( std::move( reset ) );
            }
        }
    }

    const program& prog_;
    cfg g_;
    std::vector< location > breaks_;
};

} // namespace

cfg lower_to_cfg( const program& p ) { return lowerer( p ).run(); }

std::string to_string( const cfg& g )
{
    std::ostringstream out;
    out << "vars:";
    for ( const auto& v : g.vars )
        out << " " << v.name << ":" << to_string( v.type );
    out << "\nloop heads:";
    for ( auto l : g.loop_heads )
        out << " " << g.location_name( l );
    out << "\n";
    for ( const auto& e : g.edges )
    {
        out << g.location_name( e.from ) << " -> " << g.location_name( e.to ) << " [" << to_string( *e.guard )
            << "]";
        for ( const auto& u : e.updates )
        {
            out << " " << g.vars[ u.var ].name << " := ";
            if ( u.input )
                out << g.inputs[ *u.input ].name;
            else
                out << to_string( *u.value );
        }
        out << "\n";
    }
    return out.str();
}

} // namespace bikind
