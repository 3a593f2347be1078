/**
 * @file textio.hpp
 * @brief Expression parser and printers (plain text, LaTeX, structured JSON).
 *
 * Expression grammar:
 *
 *     expr   := term (('+' | '-') term)*
 *     term   := unary (('*' | '/') unary)*
 *     unary  := ('-' | '+') unary | power
 *     power  := atom ('^' int | '^' '-' int | '^' '(' ['-'] int ')')?
 *     atom   := number | ident | ident '_{' names '}' | ident '_' letters
 *             | func '(' args ')' | '(' expr ')'
 *
 * Jet coordinates are a field name plus a derivative suffix: `y_{x1 x2}`, or
 * `y_tt` when every base variable name is a single letter. Opaque function
 * derivatives take the same suffix over their declared argument names:
 * `g_{q1}(q1, q2)`. `pi` is the circle constant.
 */
#pragma once

#include "jetvar/context.hpp"
#include "jetvar/expr.hpp"
#include "jetvar/variational.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace jetvar {

enum class Format { Plain, Latex, Structured };

[[nodiscard]] Format parse_format(const std::string& name);

/// Parses one expression. `line` and `column` locate src inside a larger
/// document so diagnostics carry file positions. Throws ParseError.
[[nodiscard]] Expr parse_expr(std::string_view src, const JetContext& ctx, int line = 1, int column = 1);

/// Parses a jet coordinate written on its own, e.g. `y_tt`.
[[nodiscard]] JetVar parse_jet_variable(std::string_view src, const JetContext& ctx, int line = 1, int column = 1);

/// Parses a derivative list such as "t t" or "x1 x2" into a multi-index;
/// an empty list is the zero multi-index.
[[nodiscard]] MultiIndex parse_derivative_list(std::string_view src, const JetContext& ctx, int line = 1,
                                               int column = 1);

[[nodiscard]] std::string print(const Expr& e, const JetContext& ctx, Format fmt = Format::Plain);
[[nodiscard]] std::string print(const SourceForm& e, const JetContext& ctx, Format fmt = Format::Plain,
                                const std::string& name = "e");
[[nodiscard]] std::string print(const BilinearForm& a, const JetContext& ctx, Format fmt = Format::Plain,
                                const std::string& name = "A");

/// Lossless tree serialization. Key names are stable; see README.
[[nodiscard]] nlohmann::json to_json(const Expr& e, const JetContext& ctx);
[[nodiscard]] nlohmann::json to_json(const SourceForm& e, const JetContext& ctx);
[[nodiscard]] nlohmann::json to_json(const BilinearForm& a, const JetContext& ctx);
[[nodiscard]] nlohmann::json to_json(const JetContext& ctx);

/// Inverse of to_json; throws ParseError on malformed documents.
[[nodiscard]] Expr expr_from_json(const nlohmann::json& j, const JetContext& ctx);
[[nodiscard]] SourceForm source_from_json(const nlohmann::json& j, const JetContext& ctx);
[[nodiscard]] BilinearForm bilinear_from_json(const nlohmann::json& j, const JetContext& ctx);

/// Structured text of an expression; parse_structured(print(e, ctx, Structured)) == e.
[[nodiscard]] Expr parse_structured(std::string_view text, const JetContext& ctx);

} // namespace jetvar
