#include "transim/address.hpp"

#include <cstdio>
#include <vector>

namespace transim {

Ipv6Address Ipv6Address::from_words(std::uint64_t hi, std::uint64_t lo) {
    Ipv6Address a;
    for (int i = 0; i < 8; ++i) {
        a.octets[i] = static_cast<std::uint8_t>(hi >> (8 * (7 - i)));
        a.octets[8 + i] = static_cast<std::uint8_t>(lo >> (8 * (7 - i)));
    }
    return a;
}

std::uint64_t Ipv6Address::hi() const {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | octets[i];
    return v;
}

std::uint64_t Ipv6Address::lo() const {
    std::uint64_t v = 0;
    for (int i = 8; i < 16; ++i) v = (v << 8) | octets[i];
    return v;
}

std::string format_address(Ipv4Address a) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", a.octet(0), a.octet(1),
                  a.octet(2), a.octet(3));
    return buf;
}

std::string format_address(const Ipv6Address& a) {
    // Locate the longest run of zero groups; runs of length 1 stay expanded.
    int best_start = -1, best_len = 0;
    int run_start = -1, run_len = 0;
    for (int i = 0; i < 8; ++i) {
        if (a.group(i) == 0) {
            if (run_start < 0) run_start = i;
            ++run_len;
            if (run_len > best_len) {
                best_len = run_len;
                best_start = run_start;
            }
        } else {
            run_start = -1;
            run_len = 0;
        }
    }
    if (best_len < 2) best_start = -1;

    std::string out;
    char buf[8];
    if (best_start < 0) {
        for (int i = 0; i < 8; ++i) {
            std::snprintf(buf, sizeof buf, "%x", a.group(i));
            out += buf;
            if (i != 7) out += ':';
        }
        return out;
    }
    for (int i = 0; i < best_start; ++i) {
        std::snprintf(buf, sizeof buf, "%x", a.group(i));
        out += buf;
        if (i + 1 < best_start) out += ':';
    }
    out += "::";
    for (int i = best_start + best_len; i < 8; ++i) {
        std::snprintf(buf, sizeof buf, "%x", a.group(i));
        out += buf;
        if (i != 7) out += ':';
    }
    return out;
}

Ipv4Address parse_ipv4(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == '.') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4)
        throw AddressParseError("IPv4 address must have four octets", text);
    std::uint32_t v = 0;
    for (const auto& p : parts) {
        if (p.empty() || p.size() > 3)
            throw AddressParseError("bad IPv4 octet", p.empty() ? text : p);
        unsigned octet = 0;
        for (char c : p) {
            if (c < '0' || c > '9') throw AddressParseError("bad IPv4 octet", p);
            octet = octet * 10 + unsigned(c - '0');
        }
        if (octet > 255) throw AddressParseError("IPv4 octet out of range", p);
        v = (v << 8) | octet;
    }
    return Ipv4Address{v};
}

namespace {

// A token is either one hex group or an embedded dotted quad (two groups).
struct Token {
    bool quad = false;
    std::uint16_t g0 = 0, g1 = 0;
};

Token parse_group_token(const std::string& tok) {
    if (tok.find('.') != std::string::npos) {
        Ipv4Address q = parse_ipv4(tok);
        Token t;
        t.quad = true;
        t.g0 = static_cast<std::uint16_t>(q.value >> 16);
        t.g1 = static_cast<std::uint16_t>(q.value & 0xffff);
        return t;
    }
    if (tok.empty() || tok.size() > 4)
        throw AddressParseError("bad IPv6 group", tok);
    std::uint16_t g = 0;
    for (char c : tok) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else throw AddressParseError("bad IPv6 group", tok);
        g = static_cast<std::uint16_t>((g << 4) | d);
    }
    return Token{false, g, 0};
}

std::vector<Token> tokenize_side(const std::string& side, const std::string& whole) {
    std::vector<Token> toks;
    if (side.empty()) return toks;
    std::string cur;
    for (std::size_t i = 0; i <= side.size(); ++i) {
        if (i == side.size() || side[i] == ':') {
            if (cur.empty()) throw AddressParseError("empty IPv6 group", whole);
            toks.push_back(parse_group_token(cur));
            cur.clear();
        } else {
            cur += side[i];
        }
    }
    return toks;
}

int slot_count(const std::vector<Token>& toks) {
    int n = 0;
    for (const auto& t : toks) n += t.quad ? 2 : 1;
    return n;
}

void emit(Ipv6Address& a, int& slot, const std::vector<Token>& toks) {
    for (const auto& t : toks) {
        a.set_group(slot++, t.g0);
        if (t.quad) a.set_group(slot++, t.g1);
    }
}

}  // namespace

Ipv6Address parse_ipv6(const std::string& text) {
    std::size_t dc = text.find("::");
    if (dc != std::string::npos && text.find("::", dc + 1) != std::string::npos)
        throw AddressParseError("multiple '::' in IPv6 address", text);

    Ipv6Address a{};
    if (dc == std::string::npos) {
        auto toks = tokenize_side(text, text);
        if (slot_count(toks) != 8)
            throw AddressParseError("IPv6 address must have eight groups", text);
        int slot = 0;
        emit(a, slot, toks);
        return a;
    }
    auto left = tokenize_side(text.substr(0, dc), text);
    auto right = tokenize_side(text.substr(dc + 2), text);
    int used = slot_count(left) + slot_count(right);
    if (used > 7)
        throw AddressParseError("'::' must compress at least one group", text);
    int slot = 0;
    emit(a, slot, left);
    slot = 8 - slot_count(right);
    emit(a, slot, right);
    return a;
}

}  // namespace transim
