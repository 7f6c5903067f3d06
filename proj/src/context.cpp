#include "ctxlab/context.hpp"

#include <stdexcept>

namespace ctxlab {

std::string_view role_name(Role role) {
    switch (role) {
        case Role::User: return "user";
        case Role::Agent: return "agent";
        case Role::System: return "system";
        case Role::Tool: return "tool";
    }
    return "user";
}

Role role_from_name(std::string_view name) {
    if (name == "user") return Role::User;
    if (name == "agent") return Role::Agent;
    if (name == "system") return Role::System;
    if (name == "tool") return Role::Tool;
    throw std::invalid_argument("unknown role name: " + std::string(name));
}

ContextItem ContextItem::payload(std::string bytes, std::string media_type,
                                 Role role) {
    if (media_type.empty())
        throw std::invalid_argument("payload requires a media type");
    ContextItem item;
    item.fragments_.push_back({role, std::move(bytes), std::move(media_type)});
    return item;
}

bool ContextItem::has_payload() const {
    for (const auto& f : fragments_)
        if (!f.is_text()) return true;
    return false;
}

std::string ContextItem::text() const {
    std::string out;
    for (const auto& f : fragments_)
        if (f.is_text()) out += f.text;
    return out;
}

std::vector<Fragment> ContextItem::transcript() const {
    std::vector<Fragment> merged;
    for (const auto& f : fragments_) {
        if (!merged.empty() && merged.back().role == f.role &&
            merged.back().is_text() && f.is_text()) {
            merged.back().text += f.text;
        } else {
            merged.push_back(f);
        }
    }
    return merged;
}

ContextItem& ContextItem::append(const ContextItem& other) {
    fragments_.insert(fragments_.end(), other.fragments_.begin(),
                      other.fragments_.end());
    return *this;
}

ContextItem& ContextItem::append(Fragment fragment) {
    fragments_.push_back(std::move(fragment));
    return *this;
}

ContextItem concat(std::span<const ContextItem> items) {
    ContextItem out;
    for (const auto& item : items) out.append(item);
    return out;
}

ContextItem concat(std::initializer_list<ContextItem> items) {
    return concat(std::span<const ContextItem>(items.begin(), items.size()));
}

ContextItem repeat(const ContextItem& item, std::size_t count) {
    ContextItem out;
    for (std::size_t i = 0; i < count; ++i) out.append(item);
    return out;
}

}  // namespace ctxlab
