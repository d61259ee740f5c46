#pragma once

#include "bikind/frontend/ast.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace bikind
{

enum class error_category
{
    lexical,
    syntax,
    undeclared_identifier,
    type_mismatch,
    duplicate_declaration,
    lowering,
};

const char* to_string( error_category c );

class frontend_error : public std::runtime_error
{
public:
    frontend_error( error_category category, source_pos pos, const std::string& message );

    error_category category() const { return category_; }
    source_pos pos() const { return pos_; }
    const std::string& message() const { return message_; }

private:
    error_category category_;
    source_pos pos_;
    std::string message_;
};

// Parses, resolves and type-checks a program. Throws frontend_error.
program parse( std::string_view source );

} // namespace bikind
