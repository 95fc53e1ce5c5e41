#include "cfl/atoms.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace cfl {

namespace {

// Process-wide interner. Append-only: ids stay valid for the process
// lifetime and name storage never moves.
struct Interner {
    std::shared_mutex mutex;
    std::deque<std::string> names;
    std::unordered_map<std::string_view, std::uint32_t> index;

    static Interner& instance() {
        static Interner self;
        return self;
    }
};

std::string canonicalize(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name)
        if (c != ' ' && c != '\t' && c != '\n' && c != '\r') out.push_back(c);
    return out;
}

}  // namespace

Atom Atom::intern(std::string_view name) {
    std::string canon = canonicalize(name);
    Interner& in = Interner::instance();
    {
        std::shared_lock lock(in.mutex);
        auto it = in.index.find(canon);
        if (it != in.index.end()) return Atom(it->second);
    }
    std::unique_lock lock(in.mutex);
    auto it = in.index.find(canon);
    if (it != in.index.end()) return Atom(it->second);
    auto id = static_cast<std::uint32_t>(in.names.size());
    in.names.push_back(std::move(canon));
    in.index.emplace(in.names.back(), id);
    return Atom(id);
}

bool Atom::interned(std::string_view name) {
    Interner& in = Interner::instance();
    std::shared_lock lock(in.mutex);
    return in.index.count(canonicalize(name)) != 0;
}

const std::string& Atom::name() const {
    Interner& in = Interner::instance();
    std::shared_lock lock(in.mutex);
    return in.names[id_];
}

std::string Atom::functor() const {
    const std::string& n = name();
    auto p = n.find('(');
    return p == std::string::npos ? n : n.substr(0, p);
}

std::string Atom::args() const {
    const std::string& n = name();
    auto p = n.find('(');
    return p == std::string::npos ? std::string() : n.substr(p);
}

bool Atom::operator<(const Atom& o) const {
    if (id_ == o.id_) return false;
    return name() < o.name();
}

std::string to_string(const Literal& l) {
    return l.positive ? l.atom.name() : "\\+ " + l.atom.name();
}

}  // namespace cfl
