#!/usr/bin/env python3
"""Regenerates the pipeline fixture set. Output is deterministic.

corpus.jsonl      1000 messages, every one matching the query packet;
                  580 carry links (20 of them two), 600 links in total that
                  expand to 288 distinct canonical URLs.
queries.txt       100-query packet.
redirects.json    offline redirect map for the corpus short links plus the
                  resolver cases below.
resolve_cases.json  expected resolver outcomes, written out by hand here.
expected.json     counts the generator built in, used as the test oracle.
"""

import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

OUT = Path(__file__).resolve().parent
rng = random.Random(2014)

N_MESSAGES = 1000
N_LINKED = 580
N_DOUBLE = 20
N_FINALS = 288
N_LINKS = N_LINKED + N_DOUBLE

BANKS = ["PrivatBank", "Diamantbank", "Ukrsibbank", "Oschadbank", "Ukreximbank", "Raiffeisen Aval",
         "Prominvestbank", "Alfa-Bank", "OTP Bank", "Pravex", "Finance and Credit", "Nadra",
         "Forum bank", "Delta bank", "Kreditprombank", "Brokbusiness", "Imexbank", "Kyivska Rus",
         "Megabank", "Pivdennyi", "Piraeus", "Credit Agricole", "ProCredit", "Sberbank", "VTB"]
TOPICS = ["deposit rates", "hryvnia exchange", "bond yields", "mortgage lending", "grain exports",
          "steel output", "gas prices", "coal mining", "rail freight", "retail sales", "insurance market",
          "stock index", "sovereign rating", "budget deficit", "inflation forecast", "currency reserves",
          "bank liquidity", "loan portfolio", "capital adequacy", "deposit guarantee", "card payments",
          "leasing market", "agro holding", "fertilizer plant", "pipeline transit", "port throughput",
          "airline tickets", "telecom tariffs", "mobile operator", "software exports", "IT outsourcing",
          "real estate", "office rents", "construction permits", "cement prices", "sugar harvest",
          "sunflower oil", "poultry exports", "dairy prices", "meat imports", "trade balance",
          "customs revenue", "tax reform", "VAT refunds", "privatization auction", "energy tariffs",
          "nuclear fuel", "power exports", "solar plants", "wind farms", "coal imports", "fuel retail",
          "auto sales", "bus manufacturer", "shipyard orders", "aircraft engines", "defense contracts",
          "pharmacy chain", "drug prices", "hospital tender", "university funding", "media holding",
          "advertising market", "cinema box", "football club", "tourism season", "hotel occupancy",
          "wine exports", "brewery sales", "tobacco excise", "salary arrears", "pension fund",
          "microfinance loans", "payment terminals", "bankruptcy filings"]
QUERIES = BANKS + TOPICS[:100 - len(BANKS)]
assert len(QUERIES) == 100

MEDIA = ["news.test", "finance.test", "economy.test", "banker.test", "markets.test", "agro.test",
         "energy.test", "business.test", "capital.test", "forbes.test", "kyivpost.test", "unian.test",
         "rbc.test", "liga.test", "epravda.test", "minfin.test", "nbu.test", "interfax.test", "zn.test",
         "korr.test", "delo.test", "expert.test", "segodnya.test", "focus.test", "tsn.test", "censor.test",
         "obozrevatel.test", "gazeta.test", "day.test", "bank.test", "blog.test", "vesti.test",
         "lb.test", "strana.test", "hromadske.test"]
SHORTENERS = [("http", "migre.me"), ("http", "bit.ly"), ("http", "ow.ly"), ("http", "tinyurl.com"),
              ("https", "lnkd.in"), ("https", "goo.gl"), ("http", "wp.me"), ("http", "j.mp"),
              ("http", "dlvr.it")]


def make_finals():
    finals = []
    seen = set()
    while len(finals) < N_FINALS:
        roll = rng.random()
        if roll < 0.04:
            url = f"https://www.youtube.com/watch?v={rng.randrange(10**6, 10**7)}"
        elif roll < 0.07:
            url = f"https://vk.com/wall-{rng.randrange(1000, 9999)}_{rng.randrange(100, 999)}"
        elif roll < 0.09:
            url = f"https://twitter.com/user{rng.randrange(100)}/status/{rng.randrange(10**8, 10**9)}"
        elif roll < 0.12:
            url = f"https://{rng.choice(MEDIA)}"  # site root: canonical form has no path
        else:
            host = rng.choice(MEDIA)
            section = rng.choice(["news", "finance", "economy", "articles", "2014/03", "blog"])
            url = f"https://{host}/{section}/{rng.randrange(10000, 99999)}"
            if rng.random() < 0.2:
                url += f"?id={rng.randrange(1, 500)}"
        if url not in seen:
            seen.add(url)
            finals.append(url)
    return finals


def surface_variant(final):
    """A different spelling of `final` that canonicalizes back to it."""
    scheme, rest = final.split("://", 1)
    host, sep, tail = rest.partition("/")
    path = sep + tail
    kind = rng.randrange(5)
    if kind == 0:
        return f"{scheme}://{host.upper()}{path}"
    if kind == 1:
        port = ":443" if scheme == "https" else ":80"
        return f"{scheme}://{host}{port}{path}"
    if kind == 2:
        return f"{scheme.upper()}://{host}{path}"
    if kind == 3 and not path:
        return final + "/"
    return final


redirects = {}
short_serial = 0


def new_short(target):
    global short_serial
    short_serial += 1
    scheme, host = SHORTENERS[short_serial % len(SHORTENERS)]
    url = f"{scheme}://{host}/c{short_serial:04d}"
    redirects[url] = target
    return url


def raw_for(final, reuse):
    """Raw link text for one citation of `final`."""
    roll = rng.random()
    if reuse and roll < 0.3:
        return rng.choice(reuse)
    if roll < 0.45:
        return surface_variant(final)
    if roll < 0.85:
        # one hop, sometimes landing on a non-canonical spelling
        return new_short(surface_variant(final) if rng.random() < 0.3 else final)
    # two hops through a second shortener
    return new_short(new_short(final))


def main():
    finals = make_finals()
    # Every final is cited at least once; the rest follow a heavy-tailed draw.
    weights = [1.0 / (i + 1) ** 1.1 for i in range(N_FINALS)]
    slots = list(range(N_FINALS)) + rng.choices(range(N_FINALS), weights=weights, k=N_LINKS - N_FINALS)
    rng.shuffle(slots)

    raws_by_final = {}
    link_texts = []
    for f in slots:
        reuse = raws_by_final.setdefault(f, [])
        raw = raw_for(finals[f], reuse)
        reuse.append(raw)
        link_texts.append((raw, finals[f]))

    order = list(range(N_MESSAGES))
    rng.shuffle(order)
    linked = set(order[:N_LINKED])
    doubles = set(order[:N_DOUBLE])

    base = datetime(2014, 3, 1, tzinfo=timezone.utc)
    messages = []
    cursor = 0
    for i in range(N_MESSAGES):
        q = QUERIES[rng.randrange(len(QUERIES))]
        other = QUERIES[rng.randrange(len(QUERIES))]
        words = rng.choice([
            f"{q} news today",
            f"Analysts discuss {q} and {other}",
            f"#{q.replace(' ', '')} {q} update",
            f"What next for {q}?",
            f"{q.upper()}: statement issued",
        ])
        urls = []
        if i in linked:
            take = 2 if i in doubles else 1
            urls = link_texts[cursor:cursor + take]
            cursor += take
        text = words
        for raw, _ in urls:
            text += rng.choice([f" {raw}", f" ({raw})", f" {raw}.", f" -> {raw} !", f"\n{raw}"])
        ts = base + timedelta(seconds=37 * i + rng.randrange(30))
        messages.append({
            "id": f"{100000 + i}",
            "author": f"user{rng.randrange(350)}",
            "timestamp": ts.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "text": text,
        })
    assert cursor == N_LINKS

    with open(OUT / "corpus.jsonl", "w", encoding="utf-8") as f:
        for m in messages:
            f.write(json.dumps(m, ensure_ascii=False) + "\n")
    with open(OUT / "queries.txt", "w", encoding="utf-8") as f:
        f.write("# business-topic query packet\n")
        for q in QUERIES:
            f.write(q + "\n")

    cases = resolver_cases()
    with open(OUT / "redirects.json", "w", encoding="utf-8") as f:
        json.dump(dict(sorted(redirects.items())), f, indent=1)
        f.write("\n")
    with open(OUT / "resolve_cases.json", "w", encoding="utf-8") as f:
        json.dump(cases, f, indent=1)
        f.write("\n")

    raws = [r for r, _ in link_texts]
    expected = {
        "messages": N_MESSAGES,
        "messages_with_links": N_LINKED,
        "links": N_LINKS,
        "distinct_finals": len(set(fin for _, fin in link_texts)),
        "distinct_raw_spellings": len(set(raws)),
        "messages_with_links_fraction": N_LINKED / N_MESSAGES,
        "unique_links_fraction": N_FINALS / N_LINKS,
        "links_in_order": [{"raw": r, "final": fin} for r, fin in link_texts],
    }
    assert expected["distinct_finals"] == N_FINALS
    with open(OUT / "expected.json", "w", encoding="utf-8") as f:
        json.dump(expected, f, indent=1)
        f.write("\n")


def resolver_cases():
    """Resolver table. Each chain is spelled out literally."""
    cases = []

    def add(raw, status, chain, final, max_depth=10, shortened=True):
        cases.append({"raw": raw, "max_depth": max_depth, "status": status, "chain": chain, "final": final,
                      "was_shortened": shortened})

    for i, (scheme, host) in enumerate(SHORTENERS):
        raw = f"{scheme}://{host}/case{i}"
        target = f"https://story{i}.test/item/{i}"
        redirects[raw] = target
        add(raw, "resolved", [raw, target], target)

    redirects["http://bit.ly/loop-a"] = "http://ow.ly/loop-b"
    redirects["http://ow.ly/loop-b"] = "http://bit.ly/loop-a"
    add("http://bit.ly/loop-a", "loop_detected", ["http://bit.ly/loop-a", "http://ow.ly/loop-b"], "http://ow.ly/loop-b")

    redirects["http://j.mp/tri-1"] = "http://j.mp/tri-2"
    redirects["http://j.mp/tri-2"] = "http://j.mp/tri-3"
    redirects["http://j.mp/tri-3"] = "HTTP://J.MP:80/tri-1#again"
    add("http://j.mp/tri-1", "loop_detected", ["http://j.mp/tri-1", "http://j.mp/tri-2", "http://j.mp/tri-3"],
        "http://j.mp/tri-3")

    redirects["http://goo.gl/self"] = "http://goo.gl/self"
    add("http://goo.gl/self", "loop_detected", ["http://goo.gl/self"], "http://goo.gl/self")

    hops = [f"http://hop{i}.test/h" for i in range(13)]
    for a, b in zip(hops, hops[1:]):
        redirects[a] = b
    add(hops[0], "depth_exceeded", hops[:11], hops[10])
    add(hops[2], "resolved", hops[2:], hops[12])
    add(hops[0], "depth_exceeded", hops[:4], hops[3], max_depth=3)

    redirects["http://tinyurl.com/dead"] = None
    add("http://tinyurl.com/dead", "fetch_failed", ["http://tinyurl.com/dead"], "http://tinyurl.com/dead")
    redirects["http://wp.me/half"] = "http://mid.test/gone"
    redirects["http://mid.test/gone"] = None
    add("http://wp.me/half", "fetch_failed", ["http://wp.me/half", "http://mid.test/gone"], "http://mid.test/gone")

    redirects["http://dlvr.it/rel"] = "/landing?x=1"
    add("http://dlvr.it/rel", "resolved", ["http://dlvr.it/rel", "http://dlvr.it/landing?x=1"],
        "http://dlvr.it/landing?x=1")

    redirects["https://lnkd.in/variant"] = "HTTPS://Story.TEST:443/#frag"
    add("https://lnkd.in/variant", "resolved", ["https://lnkd.in/variant", "HTTPS://Story.TEST:443/#frag"],
        "https://story.test")

    add("https://plain.test/a#b", "not_shortened", ["https://plain.test/a#b"], "https://plain.test/a",
        shortened=False)
    add("http://bit.ly/unmapped", "resolved", ["http://bit.ly/unmapped"], "http://bit.ly/unmapped")

    redirects["http://legacy.test/moved"] = "https://legacy.test/new"
    add("http://legacy.test/moved", "resolved", ["http://legacy.test/moved", "https://legacy.test/new"],
        "https://legacy.test/new")
    return cases


if __name__ == "__main__":
    main()
