#pragma once

#include <string_view>
#include <variant>

#include "censwald/hypothesis.hpp"
#include "censwald/model.hpp"
#include "censwald/twosample.hpp"

namespace censwald::cli {

using ParsedHypothesis = std::variant<Restriction, TwoSampleRestriction>;

/// Grammar (whitespace-insensitive, clauses separated by ',' or blanks):
///   one-sample:  name=v [, name=v ...]   or   theta=v1,v2,...
///   two-sample:  theta1=theta2           or   name1=name2 [, ...]
///   direction:   dir=greater|less|two-sided  (two-sample, single restriction only)
/// Names are the family's parameter names or their aliases (scale/sigma/a, shape/b, mean/theta).
/// Throws ParseError with the 0-based offset of the offending token.
ParsedHypothesis hypothesis_parse(std::string_view text, const Family& fam);

}  // namespace censwald::cli
