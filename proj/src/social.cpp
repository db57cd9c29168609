#include "artism/social.hpp"

#include <charconv>

#include "artism/error.hpp"
#include "artism/text.hpp"

namespace artism::social {

std::string_view to_string(PostKind kind) {
    switch (kind) {
        case PostKind::artwork: return "artwork";
        case PostKind::comment: return "comment";
        case PostKind::published_view: return "published_view";
        case PostKind::user_post: return "user_post";
    }
    return "artwork";
}

std::string_view to_string(Provenance p) { return p == Provenance::agent_generated ? "agent_generated" : "user_authored"; }

PostKind post_kind_from(std::string_view s) {
    for (auto k : {PostKind::artwork, PostKind::comment, PostKind::published_view, PostKind::user_post})
        if (to_string(k) == s) return k;
    fail(ErrorCode::InvalidPost, "unknown post kind " + std::string(s));
}

Provenance provenance_from(std::string_view s) {
    if (s == "agent_generated") return Provenance::agent_generated;
    if (s == "user_authored") return Provenance::user_authored;
    fail(ErrorCode::InvalidPost, "unknown provenance " + std::string(s));
}

std::optional<PostId> PostId::parse(std::string_view id) {
    if (id.substr(0, 2) != "p-") return std::nullopt;
    id.remove_prefix(2);
    const auto dash = id.find('-');
    if (dash == std::string_view::npos || dash == 0 || dash + 1 == id.size()) return std::nullopt;
    PostId out;
    auto [p1, e1] = std::from_chars(id.data(), id.data() + dash, out.tick);
    auto [p2, e2] = std::from_chars(id.data() + dash + 1, id.data() + id.size(), out.seq);
    if (e1 != std::errc() || e2 != std::errc() || p1 != id.data() + dash || p2 != id.data() + id.size() || out.tick < 0)
        return std::nullopt;
    return out;
}

std::string PostId::str() const { return "p-" + std::to_string(tick) + "-" + std::to_string(seq); }

void to_json(Json& j, const PublicPost& p) {
    j = Json{{"post_id", p.post_id}, {"author_id", p.author_id}, {"tick", p.tick},
             {"kind", to_string(p.kind)}, {"content", p.content}, {"provenance", to_string(p.provenance)}};
    j["reply_to"] = p.reply_to ? Json(*p.reply_to) : Json(nullptr);
    j["image_prompt"] = p.image_prompt ? Json(*p.image_prompt) : Json(nullptr);
}

void from_json(const Json& j, PublicPost& p) {
    j.at("post_id").get_to(p.post_id);
    j.at("author_id").get_to(p.author_id);
    j.at("tick").get_to(p.tick);
    p.kind = post_kind_from(j.at("kind").get<std::string>());
    j.at("content").get_to(p.content);
    p.provenance = provenance_from(j.at("provenance").get<std::string>());
    p.reply_to = j.contains("reply_to") && !j["reply_to"].is_null() ? std::optional(j["reply_to"].get<std::string>()) : std::nullopt;
    p.image_prompt =
        j.contains("image_prompt") && !j["image_prompt"].is_null() ? std::optional(j["image_prompt"].get<std::string>()) : std::nullopt;
}

std::string PostStore::next_post_id(Tick tick, std::size_t pending) const {
    auto it = per_tick_.find(tick);
    const std::uint64_t used = it == per_tick_.end() ? 0 : it->second;
    return PostId{tick, used + pending}.str();
}

const std::string& PostStore::publish(PublicPost post) {
    const auto id = PostId::parse(post.post_id);
    if (!id || id->tick != post.tick) fail(ErrorCode::InvalidPost, "malformed post id " + post.post_id);
    if (index_.count(post.post_id)) fail(ErrorCode::DuplicatePostId, post.post_id);
    if (text::trim(post.content).empty()) fail(ErrorCode::InvalidPost, "empty content");
    if (post.author_id.empty()) fail(ErrorCode::InvalidPost, "empty author");
    const bool is_comment = post.kind == PostKind::comment;
    if (is_comment != post.reply_to.has_value())
        fail(ErrorCode::InvalidPost, "reply_to must be present exactly for comments");
    if (post.image_prompt && post.kind != PostKind::artwork) fail(ErrorCode::InvalidPost, "image_prompt only on artworks");
    const bool user = is_user_author(post.author_id);
    if (user != (post.kind == PostKind::user_post)) fail(ErrorCode::InvalidPost, "user posts must come from user authors");
    if (!user && post.provenance != Provenance::agent_generated)
        fail(ErrorCode::InvalidPost, "agent-authored posts must be labeled agent_generated");
    if (user && post.provenance != Provenance::user_authored)
        fail(ErrorCode::InvalidPost, "user posts must be labeled user_authored");
    if (post.reply_to && !index_.count(*post.reply_to)) fail(ErrorCode::DanglingReply, *post.reply_to);
    if (!posts_.empty() && *id <= *PostId::parse(posts_.back().post_id))
        fail(ErrorCode::InvalidPost, "post " + post.post_id + " is not newer than " + posts_.back().post_id);
    if (post.post_id != next_post_id(post.tick)) fail(ErrorCode::InvalidPost, "post id out of sequence: " + post.post_id);

    ++per_tick_[post.tick];
    index_.emplace(post.post_id, posts_.size());
    posts_.push_back(std::move(post));
    return posts_.back().post_id;
}

FeedPage PostStore::build_feed(const std::optional<std::string>&, const std::optional<std::string>& cursor,
                               std::size_t page) const {
    require(page >= 1 && page <= kMaxPageSize, "page size must be within [1, 100]");
    // posts_[i] is the (posts_.size() - 1 - i)-th newest; walk backwards from just below the cursor.
    std::size_t start = posts_.size();
    if (cursor) {
        auto it = index_.find(*cursor);
        if (it == index_.end()) fail(ErrorCode::UnknownCursor, *cursor);
        start = it->second;
    }
    FeedPage out;
    std::size_t i = start;
    while (i > 0 && out.posts.size() < page) out.posts.push_back(posts_[--i]);
    if (!out.posts.empty() && i > 0) out.next_cursor = out.posts.back().post_id;
    return out;
}

std::vector<const PublicPost*> PostStore::in_window(Tick from, Tick to) const {
    std::vector<const PublicPost*> out;
    for (auto it = posts_.rbegin(); it != posts_.rend(); ++it) {
        if (it->tick >= to) continue;
        if (it->tick < from) break;
        out.push_back(&*it);
    }
    return out;
}

const PublicPost* PostStore::find(std::string_view post_id) const {
    auto it = index_.find(std::string(post_id));
    return it == index_.end() ? nullptr : &posts_[it->second];
}

void to_json(Json& j, const DialogueSession& s) {
    Json turns = Json::array();
    for (const auto& t : s.transcript)
        turns.push_back({{"speaker", t.speaker == Speaker::user ? "user" : "agent"}, {"text", t.text}, {"tick", t.tick}});
    j = Json{{"session_id", s.session_id}, {"user_name", s.user_name}, {"agent_id", s.agent_id},
             {"seed", s.seed},             {"transcript", turns}};
}

void from_json(const Json& j, DialogueSession& s) {
    j.at("session_id").get_to(s.session_id);
    j.at("user_name").get_to(s.user_name);
    j.at("agent_id").get_to(s.agent_id);
    j.at("seed").get_to(s.seed);
    s.transcript.clear();
    for (const auto& t : j.at("transcript"))
        s.transcript.push_back({t.at("speaker") == "user" ? Speaker::user : Speaker::agent, t.at("text"), t.at("tick")});
}

DialogueSession& DialogueBook::open(std::string session_id, std::string user_name, std::string agent_id,
                                    std::uint64_t seed) {
    require(!sessions_.count(session_id), "session already exists: " + session_id);
    auto& s = sessions_[session_id];
    s.session_id = std::move(session_id);
    s.user_name = std::move(user_name);
    s.agent_id = std::move(agent_id);
    s.seed = seed;
    return s;
}

const DialogueSession* DialogueBook::find(std::string_view session_id) const {
    auto it = sessions_.find(std::string(session_id));
    return it == sessions_.end() ? nullptr : &it->second;
}

DialogueSession* DialogueBook::find(std::string_view session_id) {
    auto it = sessions_.find(std::string(session_id));
    return it == sessions_.end() ? nullptr : &it->second;
}

void DialogueBook::record_exchange(std::string_view session_id, std::string user_text, std::string reply, Tick tick) {
    auto* s = find(session_id);
    if (!s) fail(ErrorCode::UnknownSession, std::string(session_id));
    s->transcript.push_back({Speaker::user, std::move(user_text), tick});
    s->transcript.push_back({Speaker::agent, std::move(reply), tick});
}

}  // namespace artism::social
