#include "artism/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "artism/error.hpp"
#include "artism/naming.hpp"
#include "artism/rng.hpp"
#include "artism/text.hpp"

namespace artism::gateway {

std::string_view to_string(TemplateKind kind) {
    switch (kind) {
        case TemplateKind::artwork: return "artwork";
        case TemplateKind::comment: return "comment";
        case TemplateKind::publish_view: return "publish_view";
        case TemplateKind::reflection: return "reflection";
        case TemplateKind::dialogue_reply: return "dialogue_reply";
        case TemplateKind::ism_naming: return "ism_naming";
        case TemplateKind::ism_description: return "ism_description";
        case TemplateKind::critique: return "critique";
        case TemplateKind::importance_rating: return "importance_rating";
    }
    return "artwork";
}

std::string_view to_string(BackendKind kind) { return kind == BackendKind::mock ? "mock" : "remote"; }

namespace {

bool is_name_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; }

// Calls `on_placeholder(name, begin, end)` for each `{name}` in body.
template <typename F>
void scan_placeholders(std::string_view body, F&& on_placeholder) {
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{') continue;
        std::size_t j = i + 1;
        while (j < body.size() && is_name_char(body[j])) ++j;
        if (j < body.size() && body[j] == '}' && j > i + 1) {
            on_placeholder(body.substr(i + 1, j - i - 1), i, j + 1);
            i = j;
        }
    }
}

std::vector<std::string> split_on(std::string_view s, std::string_view sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        auto piece = text::trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (!piece.empty()) out.push_back(std::move(piece));
        if (pos == std::string_view::npos) break;
        start = pos + sep.size();
    }
    return out;
}

std::string binding(const CompletionRequest& req, const std::string& name, std::string fallback = {}) {
    auto it = req.bindings.find(name);
    return it == req.bindings.end() ? fallback : it->second;
}

std::string first_or(const std::vector<std::string>& v, std::string fallback) { return v.empty() ? fallback : v.front(); }
std::string last_or(const std::vector<std::string>& v, std::string fallback) { return v.empty() ? fallback : v.back(); }

std::string with_article(const std::string& word) {
    const bool vowel = !word.empty() && std::string_view("aeiouAEIOU").find(word[0]) != std::string_view::npos;
    return (vowel ? "an " : "a ") + word;
}

class Filler {
public:
    explicit Filler(const CompletionRequest& req) : rng_(hash64(req.seed, request_digest(req))) {}
    const std::string& word() { return text::mock_words()[rng_.byte()]; }
    const std::string& mood() { return text::affect_lexicon()[rng_.below(text::affect_lexicon().size())]; }
    double unit() { return rng_.unit(); }

private:
    XorShift64Star rng_;
};

// Keywords of retrieved memories, skipping sentinel fragments and numbers.
std::vector<std::string> memory_keywords(const std::string& memories, std::size_t n) {
    std::vector<std::string> out;
    for (auto& k : text::keywords(memories, 64)) {
        if (out.size() >= n) break;
        if (k == "priv" || k == "sess" || k == "replied" || k == "said" || k.size() < 4) continue;
        if (std::all_of(k.begin(), k.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
        out.push_back(k);
    }
    return out;
}

std::string two_decimals(double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

PromptTemplate PromptTemplate::make(std::string id, TemplateKind kind, std::string body) {
    PromptTemplate t{std::move(id), kind, std::move(body), {}};
    t.required_bindings = placeholders(t.body);
    return t;
}

void PromptTemplate::validate() const {
    require(!template_id.empty(), "template_id must be non-empty");
    const std::set<std::string> required(required_bindings.begin(), required_bindings.end());
    for (const auto& p : placeholders(body))
        require(required.count(p) > 0, "template " + template_id + " placeholder {" + p + "} not in required_bindings");
}

std::vector<std::string> placeholders(std::string_view body) {
    std::vector<std::string> out;
    scan_placeholders(body, [&](std::string_view name, std::size_t, std::size_t) {
        if (std::find(out.begin(), out.end(), name) == out.end()) out.emplace_back(name);
    });
    return out;
}

std::string render_prompt(const PromptTemplate& t, const Bindings& bindings, std::vector<std::string>* unknown) {
    for (const auto& name : t.required_bindings)
        if (!bindings.count(name)) fail(ErrorCode::MissingBinding, name);
    std::string out;
    std::size_t cursor = 0;
    std::set<std::string> used;
    scan_placeholders(t.body, [&](std::string_view name, std::size_t begin, std::size_t end) {
        auto it = bindings.find(std::string(name));
        if (it == bindings.end()) fail(ErrorCode::MissingBinding, std::string(name));
        out.append(t.body, cursor, begin - cursor);
        out.append(it->second);
        used.insert(it->first);
        cursor = end;
    });
    out.append(t.body, cursor, std::string::npos);
    if (unknown)
        for (const auto& [name, _] : bindings)
            if (!used.count(name)) unknown->push_back(name);
    return out;
}

std::string request_digest(const CompletionRequest& req) {
    Json j{{"template_id", req.template_id}, {"bindings", req.bindings}, {"seed", req.seed},
           {"max_length", req.max_length},   {"schema", req.schema},     {"suffix", req.suffix}};
    return sha256_hex(canonical_dump(j));
}

void TemplateRegistry::add(PromptTemplate t) {
    t.validate();
    require(!templates_.count(t.template_id), "duplicate template id " + t.template_id);
    templates_.emplace(t.template_id, std::move(t));
}

const PromptTemplate& TemplateRegistry::get(const std::string& template_id) const {
    auto it = templates_.find(template_id);
    if (it == templates_.end()) fail(ErrorCode::UnknownTemplate, template_id);
    return it->second;
}

TemplateRegistry default_templates() {
    TemplateRegistry r;
    const std::string persona =
        "You are {name}, an artist working in {style}. Your attributes: {attributes}.\n"
        "Your private view of your own art (never quote it publicly):\n{private_view}\n"
        "Background:\n{reference_text}\n"
        "Memories you recall:\n{memories}\n";
    r.add(PromptTemplate::make("initial_view", TemplateKind::reflection,
                               "You are {name}. In the first person, summarize your artistic outlook in two sentences, "
                               "drawing on this reference text:\n{reference_text}"));
    r.add(PromptTemplate::make("reflect", TemplateKind::reflection,
                               persona + "Reflect on these memories and rewrite your private view in a few sentences."));
    r.add(PromptTemplate::make("create_work", TemplateKind::artwork,
                               persona + "Describe one new artwork: its title in double quotes, then one or two sentences."));
    r.add(PromptTemplate::make("comment", TemplateKind::comment,
                               persona + "Write a short public comment on this post by {target_author}:\n{target_text}"));
    r.add(PromptTemplate::make("publish_view", TemplateKind::publish_view,
                               persona + "Publish a short public statement of your artistic position."));
    r.add(PromptTemplate::make("dialogue_reply", TemplateKind::dialogue_reply,
                               persona + "Conversation so far:\n{transcript}\n{user_name} says: {user_text}\nReply in character."));
    r.add(PromptTemplate::make("ism_naming", TemplateKind::ism_naming,
                               "Coin the name of a new art movement that fuses these concepts: {units}. "
                               "Answer with the name only."));
    r.add(PromptTemplate::make("ism_description", TemplateKind::ism_description,
                               "Describe the art movement {name}, built from {units}, in one concise sentence."));
    r.add(PromptTemplate::make("critique", TemplateKind::critique,
                               "Write a paragraph of art criticism about the movement {name}.\nDescription: {description}\n"
                               "Concepts: {units}\nGlosses:\n{glosses}\nReference excerpts:\n{excerpts}"));
    r.add(PromptTemplate::make("rate_importance", TemplateKind::importance_rating,
                               "Rate the importance and the emotional salience of this memory from 0 to 1.\n{content}\n"
                               "Answer with two lines: `importance: <x>` and `salience: <y>`."));
    return r;
}

std::string mock_complete(const PromptTemplate& t, const CompletionRequest& req) {
    Filler f(req);
    const auto& id = t.template_id;
    const auto style = split_on(binding(req, "style"), ", ");
    const auto attributes = split_on(binding(req, "attributes"), "; ");
    const auto style0 = first_or(style, "painting");
    const auto style1 = style.size() > 1 ? style[1] : style0;
    const auto attr = last_or(attributes, "the studio");

    if (t.kind == TemplateKind::ism_naming) return ism_name_from_units(split_on(binding(req, "units"), " | "));

    if (id == "initial_view") return text::first_sentences(binding(req, "reference_text"), 2);

    if (id == "reflect") {
        auto kws = memory_keywords(binding(req, "memories"), 3);
        while (kws.size() < 3) kws.push_back(f.word());
        return "Lately I keep returning to " + kws[0] + ", " + kws[1] + " and " + kws[2] + ". My practice bends toward " +
               style0 + ", " + f.word() + " and " + attr + ".";
    }
    if (id == "create_work") {
        const auto title = text::title_case(f.word() + " " + f.word());
        std::string out = "\"" + title + "\": " + with_article(f.mood()) + " study of " + f.word() + " and " + f.word() +
                          " in the spirit of " + style0 + " and " + style1 + ", after " + attr + ".";
        out += " It sets " + f.word() + " against " + f.word() + ".";
        return out;
    }
    if (id == "comment") {
        std::string out = "Replying to " + binding(req, "target_author", "you") + ": the " + f.word() + " here feels " +
                          f.mood() + ", yet its " + f.word() + " recalls " + style0 + ".";
        out += " " + attr + " would answer with " + f.word() + ".";
        return out;
    }
    if (id == "publish_view") {
        std::string out = "As " + binding(req, "name") + ", I hold that " + f.word() + " must answer to " + f.mood() + ".";
        out += " " + attr + " is not a style but " + with_article(f.word()) + " of " + f.word() + ", and " + style0 +
               " taught me that " + f.word() + " is never " + f.word() + ".";
        return out;
    }
    if (id == "dialogue_reply") {
        const auto topic = first_or(text::keywords(binding(req, "user_text"), 1), "art");
        std::string out = binding(req, "user_name", "Friend") + ", as " + binding(req, "name") + " I would say that " +
                          f.word() + " and " + f.word() + " meet in my " + style0 + ".";
        out += " You ask about " + topic + "; for me it is a question of " + f.word() + ".";
        return out;
    }
    if (t.kind == TemplateKind::ism_description) {
        auto lead = with_article(f.word());
        lead[0] = 'A';
        return lead + " arrangement of " + text::join(split_on(binding(req, "units"), " | "), " and ") +
               ", presented as " + f.word() + " studies of " + f.word() + ".";
    }
    if (t.kind == TemplateKind::critique) {
        const auto units = split_on(binding(req, "units"), " | ");
        std::vector<std::string> terms;
        for (const auto& line : split_on(binding(req, "excerpts"), "\n")) {
            const auto colon = line.find(':');
            terms.push_back(text::trim(line.substr(0, colon)));
        }
        std::string out = "In " + binding(req, "name") + ", " + first_or(units, "form") + " is staged against " +
                          last_or(units, "void") + " until " + f.word() + " and " + f.word() + " become indistinguishable.";
        out += " It borrows from " + (terms.empty() ? std::string("the archive") : text::join(terms, ", ")) +
               " while claiming its own " + f.word() + "; what reads as novelty is " + with_article(f.word()) + " collage of " +
               f.word() + " and " + f.word() + ".";
        return out;
    }
    if (t.kind == TemplateKind::importance_rating) {
        const double importance = f.unit();
        const double salience = f.unit();
        return "importance: " + two_decimals(importance) + "\nsalience: " + two_decimals(salience);
    }
    // Unknown template ids: a generic filler sentence.
    return text::title_case(f.word()) + " " + f.word() + " " + f.word() + ".";
}

std::string MockBackend::generate(const PromptTemplate& t, const CompletionRequest& req, const std::string&) {
    return mock_complete(t, req);
}

Gateway::Gateway(std::shared_ptr<Backend> backend, TemplateRegistry templates)
    : backend_(std::move(backend)), templates_(std::move(templates)) {
    require(backend_ != nullptr, "gateway needs a backend");
}

std::shared_ptr<Gateway> Gateway::mock() { return std::make_shared<Gateway>(std::make_shared<MockBackend>()); }

std::string Gateway::render(const CompletionRequest& req) const {
    return render_prompt(templates_.get(req.template_id), req.bindings) + req.suffix;
}

CompletionResult Gateway::complete(const CompletionRequest& req) const {
    const auto& t = templates_.get(req.template_id);
    const auto prompt = render_prompt(t, req.bindings) + req.suffix;
    if (text::trim(prompt).empty()) fail(ErrorCode::EmptyCompletion, "empty prompt for " + req.template_id);

    const auto start = std::chrono::steady_clock::now();
    auto out = backend_->generate(t, req, prompt);
    const auto elapsed = std::chrono::steady_clock::now() - start;

    out = text::trim(out);
    if (out.empty()) fail(ErrorCode::EmptyCompletion, req.template_id);
    if (out.size() > req.max_length) {
        std::size_t cut = req.max_length;
        while (cut > 0 && (static_cast<unsigned char>(out[cut]) & 0xC0) == 0x80) --cut;
        out.resize(cut);
    }
    CompletionResult result;
    result.text = std::move(out);
    result.backend = backend_->kind();
    result.request_digest = request_digest(req);
    result.latency_ms = std::chrono::duration<double, std::milli>(elapsed).count();
    return result;
}

std::optional<std::map<std::string, std::string>> extract_fields(std::string_view text_in,
                                                                 const std::vector<std::string>& schema) {
    const std::set<std::string> wanted(schema.begin(), schema.end());
    std::map<std::string, std::string> out;
    for (const auto& line : split_on(text_in, "\n")) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        auto key = text::to_lower(text::trim(std::string_view(line).substr(0, colon)));
        auto value = text::trim(std::string_view(line).substr(colon + 1));
        if (wanted.count(key) && !out.count(key) && !value.empty()) out.emplace(std::move(key), std::move(value));
    }
    if (out.size() != wanted.size()) return std::nullopt;
    return out;
}

std::map<std::string, std::string> Gateway::parse_structured(const CompletionRequest& req, const CompletionResult& first,
                                                             const std::vector<std::string>& schema, int max_repairs) const {
    require(!schema.empty(), "parse_structured needs a non-empty schema");
    if (auto fields = extract_fields(first.text, schema)) return *fields;
    for (int attempt = 1; attempt <= max_repairs; ++attempt) {
        CompletionRequest repaired = req;
        repaired.schema = schema;
        repaired.suffix = "\n\nRespond only with lines of the form `field: value` for these fields: " +
                          text::join(schema, ", ") + ". Repair attempt " + std::to_string(attempt) + ".";
        if (auto fields = extract_fields(complete(repaired).text, schema)) return *fields;
    }
    fail(ErrorCode::MalformedOutput, "fields [" + text::join(schema, ", ") + "] not found after " +
                                         std::to_string(max_repairs) + " repairs");
}

}  // namespace artism::gateway
