#pragma once

#include <array>
#include <string_view>

namespace iia {

// Fixed stop list shipped with the tokenizer. Bump the version whenever an
// entry changes; cached vector spaces are keyed on it.
inline constexpr int kStopListVersion = 1;

// Java keywords and literals.
inline constexpr std::array<std::string_view, 54> kJavaStopWords = {
    "abstract",   "assert",     "boolean",  "break",      "byte",
    "case",       "catch",      "char",     "class",      "const",
    "continue",   "default",    "do",       "double",     "else",
    "enum",       "extends",    "false",    "final",      "finally",
    "float",      "for",        "goto",     "if",         "implements",
    "import",     "instanceof", "int",      "interface",  "long",
    "native",     "new",        "null",     "package",    "private",
    "protected",  "public",     "return",   "short",      "static",
    "strictfp",   "super",      "switch",   "synchronized", "this",
    "throw",      "throws",     "transient", "true",      "try",
    "var",        "void",       "volatile", "while",
};

// Common English function words (the classic Lucene list).
inline constexpr std::array<std::string_view, 33> kEnglishStopWords = {
    "a",    "an",   "and",  "are",   "as",    "at",   "be",   "but",  "by",
    "for",  "if",   "in",   "into",  "is",    "it",   "no",   "not",  "of",
    "on",   "or",   "such", "that",  "the",   "their", "then", "there",
    "these", "they", "this", "to",   "was",   "will", "with",
};

}  // namespace iia
