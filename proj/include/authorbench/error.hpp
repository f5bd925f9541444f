#pragma once

#include <stdexcept>
#include <string>

namespace authorbench {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CorpusError : public Error {
public:
    using Error::Error;
};

class SamplingError : public Error {
public:
    using Error::Error;
};

class PromptError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class LexiconError : public Error {
public:
    using Error::Error;
};

class MetricsError : public Error {
public:
    using Error::Error;
};

class ReportError : public Error {
public:
    using Error::Error;
};

class ProviderError : public Error {
public:
    enum class Kind {
        transient,   // rate limit, 5xx, timeouts: retried
        auth,        // bad or missing credential: never retried
        refusal,     // provider declined the request: recorded, never retried
        exhausted,   // transient failures outlasted the retry budget
        cache_miss,  // replay provider asked for something not in the cache
        invalid,     // malformed provider output or dimension mismatch
    };

    ProviderError(Kind kind, const std::string& what, int http_status = 0)
        : Error(what), kind_(kind), http_status_(http_status) {}

    Kind kind() const noexcept { return kind_; }
    int http_status() const noexcept { return http_status_; }

private:
    Kind kind_;
    int http_status_;
};

} // namespace authorbench
