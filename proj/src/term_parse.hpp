#pragma once

#include "ces/term.hpp"
#include "lexer.hpp"

namespace ces::detail {

TreePtr parse_tree(TokenStream& ts, bool allow_hole);
Position parse_position(TokenStream& ts);
Context parse_context_tokens(TokenStream& ts);
Term parse_term_tokens(TokenStream& ts);

}  // namespace ces::detail
