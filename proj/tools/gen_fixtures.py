#!/usr/bin/env python3
"""Regenerates the binary fixtures: the transcoder image set, the replicated
news page, the 10-page benchmark corpus of captured HTML snapshots and a
replayed request-log trace with its offline aggregation.

Output is deterministic for a given seed. Frozen MAML conversions of the
corpus (maml.json) are written by the test suite, not by this script:

    GAIUS_UPDATE_GOLDEN=1 build/tests/test_bench
"""

import argparse
import hashlib
import io
import json
import random
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFilter

ROOT = Path(__file__).resolve().parent.parent / "fixtures"


def photo(w, h, rng, detail=1.0):
    """Smooth colour blobs plus blurred grain; compresses like a photograph."""
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float32)
    img = np.zeros((h, w, 3), np.float32) + rng.uniform(60, 190, 3)
    for _ in range(14):
        cx, cy = rng.uniform(0, w), rng.uniform(0, h)
        s = rng.uniform(0.08, 0.4) * max(w, h)
        g = np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * s * s))
        img += g[..., None] * rng.uniform(-90, 90, 3)
    noise = rng.normal(0, 1, (h, w, 3)).astype(np.float32)
    grain = Image.fromarray(np.uint8(np.clip(noise * 40 + 128, 0, 255))).filter(ImageFilter.GaussianBlur(1.2))
    img += (np.asarray(grain, np.float32) - 128) * detail * 0.9 + rng.normal(0, 3, (h, w, 3))
    return Image.fromarray(np.uint8(np.clip(img, 0, 255)))


def logo(w, h, rng):
    img = Image.new("RGBA", (w, h), (0, 0, 0, 0))
    d = ImageDraw.Draw(img)
    colour = tuple(int(c) for c in rng.integers(0, 200, 3)) + (255,)
    d.rounded_rectangle([2, 2, h - 2, h - 2], radius=h // 4, fill=colour)
    for i in range(6):
        x = h + 8 + i * (w - h - 16) // 6
        d.rectangle([x, h // 3, x + (w - h) // 9, 2 * h // 3], fill=colour)
    return img


def jpeg(img, quality):
    buf = io.BytesIO()
    img.convert("RGB").save(buf, "JPEG", quality=quality)
    return buf.getvalue()


def png(img):
    buf = io.BytesIO()
    img.save(buf, "PNG", optimize=True)
    return buf.getvalue()


def media_id(data):
    return hashlib.sha256(data).hexdigest()[:16]


def dump(obj, path):
    path.write_text(json.dumps(obj, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


# ---- transcoder image set ----------------------------------------------------


def gen_images(rng):
    out = ROOT / "images"
    out.mkdir(parents=True, exist_ok=True)
    (out / "hero.jpg").write_bytes(jpeg(photo(1080, 607, rng), 92))
    (out / "wide.jpg").write_bytes(jpeg(photo(1600, 900, rng), 90))
    (out / "thumb.jpg").write_bytes(jpeg(photo(300, 200, rng), 88))
    (out / "odd.jpg").write_bytes(jpeg(photo(333, 177, rng), 90))
    (out / "gray.jpg").write_bytes(jpeg(photo(640, 480, rng).convert("L"), 90))
    (out / "logo.png").write_bytes(png(logo(480, 96, rng)))
    (out / "photo.png").write_bytes(png(photo(400, 300, rng)))


# ---- replicated news page ------------------------------------------------------


def gen_news(rng):
    out = ROOT / "news"
    (out / "media").mkdir(parents=True, exist_ok=True)
    media = []

    def add(img, quality=92):
        data = jpeg(img, quality)
        mid = media_id(data)
        (out / "media" / f"{mid}.jpg").write_bytes(data)
        media.append(mid)
        return f"/v1/media/{mid}"

    objects = []

    def text(txt, y, h, font, color="#1a1a1a", href=None, x=24, w=1032):
        o = {"type": "txt", "txt": txt, "x": x, "y": y, "w": w, "h": h, "font": font, "font-type": "Georgia", "color": color}
        if href:
            o["href"] = href
        objects.append(o)

    objects.append({"type": "rect", "x": 0, "y": 0, "w": 1080, "h": 96, "color": "#7a0019"})
    text("The Valley Courier", 24, 47, 36, "#ffffff", "/page/valley-home")
    text("Flood barriers hold as river peaks below record", 120, 104, 40)
    text("By Ruth Omondi · 14 June 2019", 236, 26, 20, "#555555")
    objects.append({"type": "img", "url": add(photo(1080, 607, rng)), "x": 0, "y": 274, "w": 1080, "h": 607})
    text("Volunteers reinforced the eastern embankment overnight.", 889, 26, 20, "#555555")
    body = [
        "The river crested at 6.1 metres early on Friday, half a metre below the 2012 record, and the new "
        "barriers along the market road held through the night.",
        "Council engineers said pumping will continue through the weekend. Residents of the low-lying "
        "wards were asked to keep drains clear and report blocked culverts on the hotline.",
    ]
    y = 935
    for para in body:
        text(para, y, 104, 26)
        y += 128
    objects.append({"type": "rect", "x": 24, "y": y, "w": 1032, "h": 160, "color": "#00adfe"})
    y += 184
    objects.append({"type": "img", "url": add(photo(1080, 400, rng)), "x": 0, "y": y, "w": 1080, "h": 400})
    y += 424
    for i, title in enumerate(["Market traders count the cost", "Schools reopen on Monday",
                               "Where to collect sandbags", "Bus routes restored"]):
        x = 0 if i % 2 == 0 else 540
        if i % 2 == 0 and i:
            y += 400
        objects.append({"type": "img", "url": add(photo(540, 304, rng)), "x": x, "y": y, "w": 540, "h": 304,
                        "href": f"/page/valley-story-{i + 1}"})
        text(title, y + 316, 68, 26, href=f"/page/valley-story-{i + 1}", x=x + 12, w=516)
    y += 400
    objects.append({"type": "text-field", "name": "email", "placeholder": "Your email for flood alerts",
                    "x": 24, "y": y, "w": 760, "h": 64})
    objects.append({"type": "button", "label": "Subscribe", "action": "/v1/forms/alerts", "x": 808, "y": y,
                    "w": 248, "h": 64, "color": "#7a0019"})

    page = {"page": {"id": "valley-courier-flood", "title": "Flood barriers hold as river peaks below record",
                     "language": "en-KE", "location": {"lat": 0.5143, "lon": 35.2698}, "author": "u-ruth",
                     "canvas_width": 1080, "version": 1, "created_at": "2019-06-14T06:00:00Z",
                     "updated_at": "2019-06-14T06:00:00Z"},
            "objects": objects}
    dump(page, out / "page.json")


# ---- benchmark corpus ---------------------------------------------------------

SITES = [
    ("valleycourier", "The Valley Courier"), ("kiberanews", "Kibera News Network"),
    ("dhakatribune-local", "Dhaka Local Tribune"), ("chennailive", "Chennai Live"),
    ("lagosdaily", "Lagos Daily"), ("nairobiwire", "Nairobi Wire"),
    ("kampalapost", "Kampala Post"), ("accramirror", "Accra Mirror"),
    ("puneherald", "Pune Herald"), ("limaexpress", "Lima Express"),
]

WORDS = ("council market water road school clinic ward river bus rains farmers traders youth league "
         "festival prices power police court budget health teachers women project bridge officials "
         "residents county community hall week month season plans report survey new local").split()


def sentence(rnd, n):
    words = [rnd.choice(WORDS) for _ in range(n)]
    return " ".join(words).capitalize() + "."


class Snapshot:
    def __init__(self):
        self.resources = []
        self.edges = []

    def add(self, url, mime, size=None, file=None, body=None, parent=None, trigger="parse", poster=None):
        idx = len(self.resources)
        r = {"url": url, "mime": mime}
        if body is not None:
            r["file"] = file
            self.files[file] = body
        else:
            r["size"] = int(size)
        if poster:
            r["poster"] = poster
        self.resources.append(r)
        if parent is not None:
            self.edges.append({"parent": parent, "child": idx, "trigger": trigger})
        return idx


def gen_page(i, site, name, np_rng, rnd):
    snap = Snapshot()
    snap.files = {}
    www = f"https://www.{site}.example"
    static = f"https://static.{site}.example"
    imgcdn = f"https://img.{site}-cdn.example"
    slug = "-".join(rnd.sample(WORDS, 4))
    url = f"{www}/news/{slug}"
    headline = sentence(rnd, 8)[:-1]
    paragraphs = [" ".join(sentence(rnd, rnd.randint(12, 24)) for _ in range(rnd.randint(2, 4)))
                  for _ in range(rnd.randint(5, 9))]

    # Content images with captured bodies.
    images = []
    hero_w = rnd.choice([1200, 1280, 1600])
    hero = jpeg(photo(hero_w, hero_w * 9 // 16, np_rng), rnd.choice([82, 85, 88]))
    images.append(("hero.jpg", hero, "image/jpeg", hero_w, hero_w * 9 // 16))
    logo_img = png(logo(360, 72, np_rng))
    for k in range(rnd.randint(3, 7)):
        w = rnd.choice([480, 560, 640])
        h = w * 2 // 3
        images.append((f"story{k}.jpg", jpeg(photo(w, h, np_rng), rnd.choice([75, 80, 85])), "image/jpeg", w, h))

    # Markup.
    viewport = 412
    boxes = []
    y = 0.0

    def tbox(text, font, x=16, w=380, href=None, color="#111111"):
        nonlocal y
        chars_per_line = max(1, int(w / (font * 0.5)))
        lines = max(1, -(-len(text) // chars_per_line))
        h = round(lines * font * 1.35)
        b = {"kind": "text-block", "source": text, "x": x, "y": y, "w": w, "h": h, "font_size": font, "color": color}
        if href:
            b["href"] = href
        boxes.append(b)
        y += h + 8

    def ibox(src, w, h, href=None):
        nonlocal y
        b = {"kind": "image", "source": src, "x": 0, "y": y, "w": w, "h": h}
        if href:
            b["href"] = href
        boxes.append(b)
        y += h + 8

    html = [f'<!DOCTYPE html><html lang="en"><head><meta charset="utf-8"><title>{headline} | {name}</title>',
            '<meta name="viewport" content="width=device-width, initial-scale=1">']
    css_names = [f"/css/{n}.css" for n in ("main", "article", "widgets", "print")[: rnd.randint(2, 4)]]
    js_names = [f"/js/{n}.js" for n in ("jquery", "vendor", "app", "lazy", "carousel", "comments")[: rnd.randint(3, 6)]]
    for c in css_names:
        html.append(f'<link rel="stylesheet" href="{static}{c}">')
    for j in js_names:
        html.append(f'<script src="{static}{j}"></script>')
    html.append('<script src="https://tags.tagmgr.example/gtm.js?id=GT-' + site.upper() + '"></script>')
    html.append('<script>window.dataLayer=window.dataLayer||[];' + "x" * rnd.randint(20000, 60000) + "</script>")
    html.append('<style>' + "".join(f".c{k}{{margin:{k}px}}" for k in range(rnd.randint(800, 2500))) + "</style>")
    html.append("</head><body>")
    html.append(f'<header style="background-color:#1d3557;color:#ffffff"><a href="{www}/"><img src="{static}/img/logo.png" width="180" height="36"></a></header>')
    boxes.append({"kind": "block", "source": "", "x": 0, "y": 0, "w": viewport, "h": 52, "background": "#1d3557"})
    y = 8.0
    ibox(f"{static}/img/logo.png", 180, 36, href=f"{www}/")
    html.append(f"<main><article><h1>{headline}</h1>")
    tbox(headline, 26)
    hero_url = f"{imgcdn}/photos/{slug}/hero.jpg"
    html.append(f'<img src="{hero_url}" width="{hero_w}" height="{hero_w * 9 // 16}">')
    ibox(hero_url, viewport, round(viewport * 9 / 16))
    story_urls = []
    for k, para in enumerate(paragraphs):
        html.append(f"<p>{para}</p>")
        tbox(para, 16)
        if k == 2:
            html.append('<div class="ad-slot" id="ad-mid"></div>')
    html.append("</article><aside><h2>More stories</h2>")
    tbox("More stories", 20)
    for name_, _, _, w, h in images[1:]:
        u = f"{imgcdn}/thumbs/{slug}/{name_}"
        story_urls.append(u)
        link = f"{www}/news/{'-'.join(rnd.sample(WORDS, 3))}"
        title = sentence(rnd, 7)[:-1]
        html.append(f'<a href="{link}"><img src="{u}" width="{w}" height="{h}"><h3>{title}</h3></a>')
        ibox(u, viewport, round(viewport * h / w), href=link)
        tbox(title, 18, href=link)
    html.append("</aside></main>")
    html.append(f'<footer><p>&copy; 2019 {name}. <a href="{www}/about">About</a></p></footer>')
    tbox(f"© 2019 {name}. About", 14, color="#444444")
    html.append('<img src="https://px.beacon.example/p.gif?s=' + site + '" width="1" height="1">')
    html.append('<script src="https://social.widget.example/sdk.js" async></script></body></html>')
    body = "\n".join(html).encode("utf-8")

    # Request graph.
    root = snap.add(f"http://{site}.example/news/{slug}", "text/html", size=rnd.randint(180, 400))
    doc = snap.add(url, "text/html", file="index.html", body=body, parent=root, trigger="redirect")
    css = [snap.add(static + c, "text/css", size=rnd.randint(15000, 90000), parent=doc) for c in css_names]
    for c in css[:2]:
        for f in range(rnd.randint(1, 3)):
            snap.add(f"https://fonts.fontcdn.example/s/font{f}-{rnd.randint(100, 999)}.woff2", "font/woff2",
                     size=rnd.randint(18000, 48000), parent=c, trigger="stylesheet")
        snap.add(f"{static}/img/sprite-{rnd.randint(1, 9)}.png", "image/png", size=rnd.randint(8000, 40000),
                 parent=c, trigger="stylesheet")
    js = [snap.add(static + j, "application/javascript", size=rnd.randint(25000, 160000), parent=doc) for j in js_names]
    snap.add(f"{static}/img/logo.png", "image/png", file="logo.png", body=logo_img, parent=doc)
    snap.add(hero_url, "image/jpeg", file="hero.jpg", body=hero, parent=doc)
    for (fname, data, mime, _, _), u in zip(images[1:], story_urls):
        snap.add(u, mime, file=fname, body=data, parent=doc)
    snap.add(f"https://px.beacon.example/p.gif?s={site}", "image/gif", size=43, parent=doc)

    # Lazy-loaded images fetched by script.
    for k in range(rnd.randint(3, 8)):
        snap.add(f"{imgcdn}/lazy/{slug}/{k}.jpg", "image/jpeg", size=rnd.randint(12000, 60000), parent=js[-1],
                 trigger="script")

    # Tag manager chain.
    gtm = snap.add(f"https://tags.tagmgr.example/gtm.js?id=GT-{site.upper()}", "application/javascript",
                   size=rnd.randint(70000, 110000), parent=doc)
    ga = snap.add("https://www.analytics.example/analytics.js", "application/javascript",
                  size=rnd.randint(40000, 50000), parent=gtm, trigger="script")
    snap.add(f"https://www.analytics.example/collect?v=1&t=pageview&dl={slug}", "image/gif", size=35, parent=ga,
             trigger="script")
    pix = snap.add("https://connect.pixel.example/en_US/fbevents.js", "application/javascript",
                   size=rnd.randint(55000, 95000), parent=gtm, trigger="script")
    cfg = snap.add(f"https://connect.pixel.example/signals/config/{rnd.randint(10**9, 10**10)}",
                   "application/javascript", size=rnd.randint(60000, 120000), parent=pix, trigger="script")
    snap.add("https://www.pixel.example/tr?ev=PageView", "image/gif", size=44, parent=cfg, trigger="script")
    cmp_ = snap.add("https://cmp.consent.example/cmp.js", "application/javascript", size=rnd.randint(30000, 70000),
                    parent=gtm, trigger="script")
    snap.add("https://cmp.consent.example/vendorlist.json", "application/json", size=rnd.randint(40000, 90000),
             parent=cmp_, trigger="script")

    # Ad stack: loader -> implementation -> header bidding -> auctions -> creative.
    loader = snap.add("https://securepubads.adserver.example/tag/js/gpt.js", "application/javascript",
                      size=rnd.randint(40000, 80000), parent=js[0], trigger="script")
    impl = snap.add(f"https://securepubads.adserver.example/gpt/pubads_impl_{rnd.randint(200, 400)}.js",
                    "application/javascript", size=rnd.randint(150000, 260000), parent=loader, trigger="script")
    prebid = snap.add(f"{static}/js/prebid.js", "application/javascript", size=rnd.randint(180000, 320000),
                      parent=impl, trigger="script")
    bids = [snap.add(f"https://bid.{ssp}.example/openrtb2/auction", "application/json",
                     size=rnd.randint(800, 4000), parent=prebid, trigger="script")
            for ssp in rnd.sample(["ssp-alpha", "ssp-beta", "ssp-gamma", "ssp-delta", "ssp-eps"], rnd.randint(2, 4))]
    for b in bids:
        snap.add(f"https://sync.{rnd.choice(['dmp-one', 'dmp-two', 'dmp-three'])}.example/match?{b}", "image/gif",
                 size=43, parent=b, trigger="script")
    ads = snap.add("https://securepubads.adserver.example/gampad/ads?slots=2", "application/json",
                   size=rnd.randint(6000, 20000), parent=prebid, trigger="script")
    for slot in range(2):
        ch = snap.add(f"https://tpc.adcdn.example/safeframe/{slot}/container.html", "text/html",
                      size=rnd.randint(8000, 15000), parent=ads, trigger="script")
        cj = snap.add(f"https://tpc.adcdn.example/creative/{rnd.randint(1000, 9999)}.js", "application/javascript",
                      size=rnd.randint(20000, 60000), parent=ch, trigger="script")
        snap.add(f"https://tpc.adcdn.example/simgad/{rnd.randint(10**6, 10**7)}.jpg", "image/jpeg",
                 size=rnd.randint(30000, 120000), parent=cj, trigger="script")
        snap.add(f"https://ad.verify.example/imp?slot={slot}", "image/gif", size=43, parent=cj, trigger="script")

    # Social widget.
    sdk = snap.add("https://social.widget.example/sdk.js", "application/javascript", size=rnd.randint(60000, 100000),
                   parent=doc)
    frame = snap.add("https://social.widget.example/plugins/like.html", "text/html", size=rnd.randint(15000, 30000),
                     parent=sdk, trigger="script")
    snap.add("https://static.widgetcdn.example/rsrc/like.js", "application/javascript",
             size=rnd.randint(80000, 150000), parent=frame, trigger="script")

    manifest = {"url": snap.resources[0]["url"], "title": f"{headline} | {name}", "viewport_width": viewport,
                "resources": snap.resources, "edges": snap.edges}
    if i < 5:
        manifest["layout_boxes"] = boxes
    return manifest, snap.files


def gen_corpus(np_rng, rnd):
    out = ROOT / "corpus"
    out.mkdir(parents=True, exist_ok=True)
    for i, (site, name) in enumerate(SITES):
        d = out / f"{i:02d}-{site}"
        d.mkdir(parents=True, exist_ok=True)
        manifest, files = gen_page(i, site, name, np_rng, rnd)
        for fname, data in files.items():
            (d / fname).write_bytes(data)
        dump(manifest, d / "manifest.json")


# ---- request-log trace -------------------------------------------------------


def gen_metrics(seed):
    rnd = random.Random(seed + 5)
    out = ROOT / "metrics"
    out.mkdir(parents=True, exist_ok=True)
    fids = ["low", "medium", "high"]
    base = {"low": 9_000, "medium": 60_000, "high": 290_000}
    lines, sizes, plts, counts = [], [], [], {f: 0 for f in fids}
    for i in range(240):
        f = rnd.choices(fids, weights=[3, 5, 2])[0]
        size = int(base[f] * rnd.uniform(0.6, 1.8))
        plt = None if rnd.random() < 0.2 else round(rnd.lognormvariate(7.3, 0.5), 1)
        counts[f] += 1
        sizes.append(size)
        if plt is not None:
            plts.append(plt)
        rec = {
            "timestamp": f"2019-08-{1 + i // 24:02d}T{i % 24:02d}:{rnd.randrange(60):02d}:00Z",
            "page_id": f"p-{rnd.randrange(12):02d}",
            "fidelity": f,
            "page_size": size,
            "plt_ms": plt,
            "geo": {"lat": round(-1.29 + rnd.uniform(-0.05, 0.05), 2), "lon": round(36.82 + rnd.uniform(-0.05, 0.05), 2)},
            "network_type": rnd.choice(["2g", "3g", "4g"]),
            "device_model": rnd.choice(["SM-J200G", "TECNO W3", "itel A16"]),
        }
        lines.append(json.dumps(rec, separators=(",", ":")))
    (out / "trace.jsonl").write_text("\n".join(lines) + "\n")

    def dist(v):
        a = np.asarray(v, dtype=float)
        return {"count": len(v), "min": a.min(), "p50": np.percentile(a, 50), "p90": np.percentile(a, 90),
                "p95": np.percentile(a, 95), "max": a.max(), "mean": a.mean()}

    summary = {"requests": len(sizes), "by_fidelity": counts, "page_size": dist(sizes), "plt_ms": dist(plts)}
    dump(json.loads(json.dumps(summary, default=float)), out / "summary.json")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=2019)
    ap.add_argument("--only", choices=["images", "news", "corpus", "metrics"])
    args = ap.parse_args()
    np_rng = np.random.default_rng(args.seed)
    rnd = random.Random(args.seed)
    if args.only in (None, "images"):
        gen_images(np_rng)
    if args.only in (None, "news"):
        gen_news(np_rng)
    if args.only in (None, "corpus"):
        gen_corpus(np_rng, rnd)
    if args.only in (None, "metrics"):
        gen_metrics(args.seed)


if __name__ == "__main__":
    main()
