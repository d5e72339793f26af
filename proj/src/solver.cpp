#include "concai/unknown.hpp"

namespace concai {

namespace {
std::string bits_text(LockSet s) {
    std::string out = "{";
    bool first = true;
    for (auto m : s.members()) {
        if (!first) out += ",";
        first = false;
        out += "m" + std::to_string(m);
    }
    return out + "}";
}
} // namespace

std::string Unknown::print() const {
    switch (kind) {
    case Kind::PP: return "[u" + std::to_string(point) + "," + bits_text(held) + "]";
    case Kind::ProtG: return "[g" + std::to_string(global) + "]";
    case Kind::ProtGUnprot: return "[g" + std::to_string(global) + "]'";
    case Kind::SyncG:
        return "[g" + std::to_string(global) + ",m" + std::to_string(mutex) + "," +
               bits_text(background) + "]";
    case Kind::WriteG:
        return "[g" + std::to_string(global) + ",m" + std::to_string(mutex) + "," +
               bits_text(background) + "," + bits_text(write_locks) + "]";
    case Kind::MProt: return "M[g" + std::to_string(global) + "]";
    }
    return "?";
}

} // namespace concai
