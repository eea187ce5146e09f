import streamlit as st

from config import APP_CONFIG, CLI_DEFAULTS
from spectral.symbols import BUILTINS


def render_sidebar():
    """Render the sidebar with operator and experiment parameters"""

    # Branding
    st.markdown(f"""
    <div class="sidebar-header">
        <h2>{APP_CONFIG['logo']} {APP_CONFIG['name']}</h2>
        <p>{APP_CONFIG['tagline']}</p>
        <small>v{APP_CONFIG['version']}</small>
    </div>
    """, unsafe_allow_html=True)

    st.markdown("### 🔧 Operator")
    defaults = CLI_DEFAULTS["pseudospec"]
    symbol_name = st.selectbox("Symbol", list(BUILTINS), index=0)
    amplitude = st.number_input("Amplitude", value=1.0, min_value=0.05, step=0.05)
    h = st.select_slider("h", options=[0.2, 0.1, 0.05, 0.025], value=defaults["h"])
    K = st.number_input("Truncation K", value=int(max(defaults["K"], 4 / h)), min_value=4, max_value=400, step=4)

    st.markdown("---")
    st.markdown("### 🗺️ Pseudospectrum Grid")
    grid = dict(defaults["grid"])
    col1, col2 = st.columns(2)
    with col1:
        grid["re_min"] = st.number_input("Re min", value=grid["re_min"])
        grid["im_min"] = st.number_input("Im min", value=grid["im_min"])
        grid["nx"] = st.number_input("nx", value=grid["nx"], min_value=2, max_value=200)
    with col2:
        grid["re_max"] = st.number_input("Re max", value=grid["re_max"])
        grid["im_max"] = st.number_input("Im max", value=grid["im_max"])
        grid["ny"] = st.number_input("ny", value=grid["ny"], min_value=2, max_value=200)

    st.markdown("---")
    st.markdown("### 🎲 Monte Carlo")
    weyl = CLI_DEFAULTS["weyl-mc"]
    trials = st.slider("Trials", min_value=1, max_value=50, value=min(weyl["trials"], 10))
    weyl_h = st.select_slider("Weyl h", options=[0.05, 0.04, 0.02], value=0.04)
    seed = st.number_input("Seed", value=0, min_value=0, step=1)
    unperturbed = st.checkbox("Unperturbed baseline", value=False)

    return {
        "symbol": {"name": symbol_name, "amplitude": float(amplitude)},
        "h": float(h),
        "K": int(K),
        "grid": grid,
        "eps_list": defaults["eps_list"],
        "weyl": {
            "symbol": {"name": symbol_name, "amplitude": float(amplitude)},
            "region": weyl["region"],
            "h_list": [float(weyl_h)],
            "trials": int(trials),
            "delta_exponent": weyl["delta_exponent"],
            "C1": weyl["C1"],
            "c_K": weyl["c_K"],
            "unperturbed": bool(unperturbed),
        },
        "seed": int(seed),
    }
