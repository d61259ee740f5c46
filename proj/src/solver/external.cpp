#include "bikind/solver/solver.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <optional>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace bikind
{

using namespace smt;

namespace
{

using clock = std::chrono::steady_clock;

class child_process
{
public:
    explicit child_process( const std::string& command )
    {
        int in[ 2 ], out[ 2 ];
        if ( pipe( in ) != 0 || pipe( out ) != 0 )
            throw std::runtime_error( std::string( "pipe: " ) + std::strerror( errno ) );
        pid_ = fork();
        if ( pid_ < 0 )
            throw std::runtime_error( std::string( "fork: " ) + std::strerror( errno ) );
        if ( pid_ == 0 )
        {
            dup2( in[ 0 ], STDIN_FILENO );
            dup2( out[ 1 ], STDOUT_FILENO );
            const int devnull = open( "/dev/null", O_WRONLY );
            if ( devnull >= 0 )
                dup2( devnull, STDERR_FILENO );
            close( in[ 0 ] );
            close( in[ 1 ] );
            close( out[ 0 ] );
            close( out[ 1 ] );
            execl( "/bin/sh", "sh", "-c", command.c_str(), static_cast< char* >( nullptr ) );
            _exit( 127 );
        }
        close( in[ 0 ] );
        close( out[ 1 ] );
        to_child_ = in[ 1 ];
        from_child_ = out[ 0 ];
    }

    ~child_process()
    {
        close_input();
        if ( from_child_ >= 0 )
            close( from_child_ );
        if ( pid_ > 0 )
        {
            kill( pid_, SIGKILL );
            waitpid( pid_, nullptr, 0 );
        }
    }

    bool write_all( const std::string& text )
    {
        std::size_t done = 0;
        while ( done < text.size() )
        {
            const ssize_t n = write( to_child_, text.data() + done, text.size() - done );
            if ( n < 0 && errno == EINTR )
                continue;
            if ( n <= 0 )
                return false;
            done += static_cast< std::size_t >( n );
        }
        return true;
    }

    void close_input()
    {
        if ( to_child_ >= 0 )
            close( to_child_ );
        to_child_ = -1;
    }

    // Reads until `complete(buffer)` holds or EOF; nullopt on timeout.
    template < typename Pred >
    std::optional< std::string > read_until( Pred complete, clock::time_point deadline, bool& eof )
    {
        eof = false;
        while ( !complete( buffer_ ) )
        {
            const auto left = std::chrono::duration_cast< std::chrono::milliseconds >( deadline - clock::now() );
            if ( left.count() <= 0 )
                return std::nullopt;
            pollfd p{ from_child_, POLLIN, 0 };
            const int ready = poll( &p, 1, static_cast< int >( std::min< long long >( left.count(), 1000 ) ) );
            if ( ready < 0 && errno == EINTR )
                continue;
            if ( ready <= 0 )
                continue;
            char chunk[ 4096 ];
            const ssize_t n = read( from_child_, chunk, sizeof chunk );
            if ( n < 0 && errno == EINTR )
                continue;
            if ( n <= 0 )
            {
                eof = true;
                break;
            }
            buffer_.append( chunk, static_cast< std::size_t >( n ) );
        }
        return buffer_;
    }

    void consume( std::size_t n ) { buffer_.erase( 0, n ); }

private:
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

// Minimal s-expression reader for (get-value ...) responses.
struct sexpr
{
    std::string atom;
    std::vector< sexpr > list;
    bool is_list = false;
};

bool balanced( const std::string& s, std::size_t& end )
{
    int depth = 0;
    bool started = false;
    for ( std::size_t i = 0; i < s.size(); ++i )
    {
        if ( s[ i ] == '(' )
        {
            ++depth;
            started = true;
        }
        else if ( s[ i ] == ')' )
        {
            if ( --depth == 0 && started )
            {
                end = i + 1;
                return true;
            }
        }
        else if ( s[ i ] == '|' )
        {
            const auto close = s.find( '|', i + 1 );
            if ( close == std::string::npos )
                return false;
            i = close;
        }
    }
    return false;
}

sexpr parse_sexpr( const std::string& s, std::size_t& i )
{
    while ( i < s.size() && std::isspace( static_cast< unsigned char >( s[ i ] ) ) )
        ++i;
    if ( i >= s.size() )
        throw std::runtime_error( "unexpected end of solver output" );
    sexpr e;
    if ( s[ i ] == '(' )
    {
        e.is_list = true;
        ++i;
        for ( ;; )
        {
            while ( i < s.size() && std::isspace( static_cast< unsigned char >( s[ i ] ) ) )
                ++i;
            if ( i >= s.size() )
                throw std::runtime_error( "unbalanced solver output" );
            if ( s[ i ] == ')' )
            {
                ++i;
                return e;
            }
            e.list.push_back( parse_sexpr( s, i ) );
        }
    }
    if ( s[ i ] == ')' )
        throw std::runtime_error( "unexpected ')' in solver output" );
    if ( s[ i ] == '|' )
    {
        const auto close = s.find( '|', i + 1 );
        e.atom = s.substr( i + 1, close - i - 1 );
        i = close + 1;
        return e;
    }
    const std::size_t start = i;
    while ( i < s.size() && !std::isspace( static_cast< unsigned char >( s[ i ] ) ) && s[ i ] != '(' && s[ i ] != ')' )
        ++i;
    e.atom = s.substr( start, i - start );
    return e;
}

std::uint64_t parse_value( const sexpr& e )
{
    if ( !e.is_list )
    {
        const std::string& a = e.atom;
        if ( a.rfind( "#x", 0 ) == 0 )
            return std::stoull( a.substr( 2 ), nullptr, 16 );
        if ( a.rfind( "#b", 0 ) == 0 )
            return std::stoull( a.substr( 2 ), nullptr, 2 );
    }
    else if ( e.list.size() == 3 && !e.list[ 0 ].is_list && e.list[ 0 ].atom == "_" && !e.list[ 1 ].is_list &&
              e.list[ 1 ].atom.rfind( "bv", 0 ) == 0 )
        return std::stoull( e.list[ 1 ].atom.substr( 2 ) );
    throw std::runtime_error( "unrecognised bit-vector value in solver output" );
}

class external_backend : public backend
{
public:
    explicit external_backend( std::string command ) : command_( std::move( command ) )
    {
        std::signal( SIGPIPE, SIG_IGN );
    }

    std::string id() const override { return "cmd:" + command_; }

    solve_result solve( const query& q, std::chrono::milliseconds budget ) override
    {
        const auto deadline = clock::now() + budget;
        solve_result r;
        auto fail = [ & ]( unknown_reason why, std::string detail ) {
            r = {};
            r.status = sat_status::unknown;
            r.reason = why;
            r.detail = std::move( detail );
            return r;
        };

        try
        {
            child_process child( command_ );
            if ( !child.write_all( to_smtlib( q ) ) )
                return fail( unknown_reason::process_failure, "solver closed its input" );

            bool eof = false;
            auto line = child.read_until(
                []( const std::string& b ) { return b.find( '\n' ) != std::string::npos; }, deadline, eof );
            if ( !line )
                return fail( unknown_reason::timeout, "solver exceeded its time budget" );
            const auto nl = line->find( '\n' );
            std::string answer = line->substr( 0, nl == std::string::npos ? line->size() : nl );
            while ( !answer.empty() && std::isspace( static_cast< unsigned char >( answer.back() ) ) )
                answer.pop_back();
            child.consume( nl == std::string::npos ? line->size() : nl + 1 );

            if ( answer == "unsat" )
            {
                r.status = sat_status::unsat;
                child.write_all( "(exit)\n" );
                return r;
            }
            if ( answer == "unknown" )
                return fail( unknown_reason::timeout, "solver answered unknown" );
            if ( answer != "sat" )
                return fail( unknown_reason::process_failure,
                             answer.empty() ? "solver produced no answer" : "unexpected solver output: " + answer );

            r.status = sat_status::sat;
            if ( q.decls.empty() )
                return r;
            std::string request = "(get-value (";
            for ( const auto& d : q.decls )
                request += " " + to_string( d.key() );
            request += "))\n(exit)\n";
            if ( !child.write_all( request ) )
                return fail( unknown_reason::process_failure, "solver closed its input" );
            child.close_input();

            std::size_t end = 0;
            auto body =
                child.read_until( [ & ]( const std::string& b ) { return balanced( b, end ); }, deadline, eof );
            if ( !body )
                return fail( unknown_reason::timeout, "solver exceeded its time budget" );
            if ( !balanced( *body, end ) )
                return fail( unknown_reason::process_failure, "truncated get-value response" );

            std::size_t pos = 0;
            const sexpr values = parse_sexpr( *body, pos );
            if ( !values.is_list )
                return fail( unknown_reason::process_failure, "malformed get-value response" );
            for ( const auto& pair : values.list )
            {
                if ( !pair.is_list || pair.list.size() != 2 || pair.list[ 0 ].is_list )
                    return fail( unknown_reason::process_failure, "malformed get-value response" );
                const auto& name = pair.list[ 0 ].atom;
                const auto at = name.rfind( '@' );
                if ( at == std::string::npos )
                    return fail( unknown_reason::process_failure, "unexpected symbol " + name );
                r.model[ { name.substr( 0, at ), std::stoi( name.substr( at + 1 ) ) } ] = parse_value( pair.list[ 1 ] );
            }
            return r;
        }
        catch ( const std::exception& e )
        {
            return fail( unknown_reason::process_failure, e.what() );
        }
    }

private:
    std::string command_;
};

} // namespace

std::unique_ptr< backend > make_external_backend( std::string command_line )
{
    return std::make_unique< external_backend >( std::move( command_line ) );
}

} // namespace bikind
