#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace cfl {

// Interned ground atom. Names are canonicalized (whitespace stripped) on
// interning; equal names always yield the same id, so atoms compare and
// hash as plain integers across programs.
class Atom {
public:
    Atom() : id_(0) {}

    static Atom intern(std::string_view name);
    static bool interned(std::string_view name);

    std::uint32_t id() const { return id_; }
    const std::string& name() const;

    // Splits "f(a,b)" into functor "f" and argument suffix "(a,b)".
    std::string functor() const;
    std::string args() const;

    bool operator==(const Atom& o) const { return id_ == o.id_; }
    bool operator!=(const Atom& o) const { return id_ != o.id_; }
    bool operator<(const Atom& o) const;  // by name, for deterministic ordering

private:
    explicit Atom(std::uint32_t id) : id_(id) {}
    std::uint32_t id_;
};

struct AtomHash {
    std::size_t operator()(const Atom& a) const { return std::hash<std::uint32_t>()(a.id()); }
};

struct Literal {
    Atom atom;
    bool positive = true;

    Literal() = default;
    Literal(Atom a, bool pos) : atom(a), positive(pos) {}

    Literal negated() const { return {atom, !positive}; }
    bool operator==(const Literal& o) const { return atom == o.atom && positive == o.positive; }
    bool operator!=(const Literal& o) const { return !(*this == o); }
};

inline Literal pos(Atom a) { return {a, true}; }
inline Literal neg(Atom a) { return {a, false}; }

std::string to_string(const Literal& l);

}  // namespace cfl
