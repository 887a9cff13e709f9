"""Regenerates the synthetic raster files used by the fixture corpus.

The pictures are flat drawings with a known dominant color so the layout
tests can check dominant-color extraction against the pixels.
"""
import pathlib

from PIL import Image, ImageDraw

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "corpus" / "images"


def red_apple():
    im = Image.new("RGB", (800, 1000), (46, 110, 52))
    d = ImageDraw.Draw(im)
    d.ellipse((150, 250, 650, 750), fill=(200, 24, 30))
    d.rectangle((390, 150, 410, 260), fill=(90, 60, 30))
    d.ellipse((410, 170, 520, 230), fill=(70, 150, 60))
    return im


def blossom():
    im = Image.new("RGB", (1920, 1080), (120, 170, 220))
    d = ImageDraw.Draw(im)
    for k in range(12):
        cx, cy = 160 + 140 * k, 300 + (k % 3) * 220
        for dx, dy in ((0, -45), (43, -14), (27, 36), (-27, 36), (-43, -14)):
            d.ellipse((cx + dx - 30, cy + dy - 30, cx + dx + 30, cy + dy + 30),
                      fill=(250, 232, 236))
        d.ellipse((cx - 12, cy - 12, cx + 12, cy + 12), fill=(240, 200, 60))
    return im


def orchard():
    im = Image.new("RGB", (1600, 1200), (150, 200, 240))
    d = ImageDraw.Draw(im)
    d.rectangle((0, 500, 1600, 1200), fill=(96, 150, 60))
    for row in range(4):
        y = 520 + row * 170
        for x in range(60, 1600, 180 - row * 20):
            d.ellipse((x, y - 90, x + 110, y + 10), fill=(40, 95, 40))
            d.rectangle((x + 50, y + 10, x + 60, y + 60), fill=(80, 55, 30))
    return im


def cider_press():
    im = Image.new("RGB", (640, 640), (58, 40, 28))
    d = ImageDraw.Draw(im)
    d.rectangle((160, 120, 480, 560), fill=(140, 96, 52))
    d.rectangle((300, 40, 340, 200), fill=(110, 110, 115))
    d.rectangle((190, 420, 450, 540), fill=(210, 170, 60))
    return im


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    red_apple().save(OUT / "red_apple_on_branch.png", optimize=False)
    cider_press().save(OUT / "cider_press.png", optimize=False)
    blossom().save(OUT / "apple_blossom_spring.jpg", quality=85)
    orchard().save(OUT / "apple_orchard_rows.jpg", quality=85)


if __name__ == "__main__":
    main()
