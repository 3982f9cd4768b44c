// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace pnembed {

// XML that cannot be read at all.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed input that violates net structure (dangling arc, duplicate id, ...).
class StructureError : public std::runtime_error {
public:
    explicit StructureError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class EmptyCorpus : public std::runtime_error {
public:
    explicit EmptyCorpus(const std::string& msg) : std::runtime_error(msg) {}
};

class UnknownToken : public std::runtime_error {
public:
    explicit UnknownToken(const std::string& msg) : std::runtime_error(msg) {}
};

class CannotSample : public std::runtime_error {
public:
    explicit CannotSample(const std::string& msg) : std::runtime_error(msg) {}
};

class DegenerateVector : public std::runtime_error {
public:
    explicit DegenerateVector(const std::string& msg) : std::runtime_error(msg) {}
};

class TooFewPoints : public std::runtime_error {
public:
    explicit TooFewPoints(const std::string& msg) : std::runtime_error(msg) {}
};

class UndefinedSilhouette : public std::runtime_error {
public:
    explicit UndefinedSilhouette(const std::string& msg) : std::runtime_error(msg) {}
};

class StratifyError : public std::runtime_error {
public:
    explicit StratifyError(const std::string& msg) : std::runtime_error(msg) {}
};

class SingleClass : public std::runtime_error {
public:
    explicit SingleClass(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pnembed
