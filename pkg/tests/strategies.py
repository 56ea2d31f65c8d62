from hypothesis import strategies as st

from stabkit.geometry import Instance


@st.composite
def boxes(draw, max_coord=12, max_side=6, tall=None):
    x = draw(st.integers(0, max_coord))
    y = draw(st.integers(0, max_coord))
    w = draw(st.integers(1, max_side))
    if tall is True:
        h = draw(st.integers(w, w + max_side))
    elif tall is False:
        h = draw(st.integers(1, w))
        w, h = (w, h) if h < w else (w + 1, h)
    else:
        h = draw(st.integers(1, max_side))
    return (x, y, x + w, y + h)


@st.composite
def instances(draw, min_n=1, max_n=6, tall=None, **kw):
    n = draw(st.integers(min_n, max_n))
    bs = [draw(boxes(tall=tall, **kw)) for _ in range(n)]
    return Instance.from_boxes(bs)
