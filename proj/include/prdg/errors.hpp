#pragma once

#include <stdexcept>
#include <string>

namespace prdg {

/* Error categories, mapped to process exit codes by the CLI driver:
 * config -> 2, numeric -> 3, io -> 4. */
enum class error_kind { config, numeric, io };

/* CLI exit codes: 0 ok, 2 config, 3 numerical, 4 I/O. */
inline int exit_code(error_kind kind) {
    switch (kind) {
    case error_kind::config: return 2;
    case error_kind::numeric: return 3;
    case error_kind::io: return 4;
    }
    return 1;
}

class error : public std::runtime_error {
public:
    error(error_kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    error_kind kind() const { return kind_; }

private:
    error_kind kind_;
};

class config_error : public error {
public:
    explicit config_error(const std::string& what) : error(error_kind::config, what) {}
};

class io_error : public error {
public:
    explicit io_error(const std::string& what) : error(error_kind::io, what) {}
};

/* Malformed input file; carries the 1-based line number where parsing failed.
 * Mesh files are io errors, study configs count as config errors. */
class parse_error : public error {
public:
    parse_error(const std::string& path, size_t line, const std::string& what,
                error_kind kind = error_kind::io)
        : error(kind, path + ":" + std::to_string(line) + ": " + what), line_(line) {}

    size_t line() const { return line_; }

private:
    size_t line_;
};

/* Mesh connectivity violates conformity (hanging node, duplicated cell, ...). */
class topology_error : public error {
public:
    explicit topology_error(const std::string& what) : error(error_kind::io, what) {}
};

/* The local least-squares problem is rank deficient on some element patch,
 * so the reconstruction is not unique there. */
class uniqueness_violation : public error {
public:
    uniqueness_violation(int cell, const std::string& what)
        : error(error_kind::numeric, "cell " + std::to_string(cell) + ": " + what), cell_(cell) {}

    int cell() const { return cell_; }

private:
    int cell_;
};

class factorization_error : public error {
public:
    explicit factorization_error(const std::string& what) : error(error_kind::numeric, what) {}
};

} // namespace prdg
