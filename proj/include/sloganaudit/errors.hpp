#pragma once

#include <stdexcept>

namespace sloganaudit {

// Invalid configuration: bad prompt templates, malformed config JSON,
// missing files or API keys. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Content that violates a documented invariant (corpus records, lexicon
// entries, taxonomy rules). Exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A backend failed to produce a slogan after retries. Exit code 3.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An analysis stage could not proceed (missing baseline, empty samples).
// Exit code 4 inside `audit`.
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sloganaudit
