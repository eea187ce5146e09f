import numpy as np
import plotly.graph_objects as go
import streamlit as st

from config import APP_CONFIG, PERFORMANCE_CONFIG

COLORS = APP_CONFIG["colors"]


@st.cache_data(ttl=PERFORMANCE_CONFIG["cache_ttl"])
def compute_pseudospectrum(symbol_tree, h, K, grid_tree, eps_list):
    from spectral.linalg import eig
    from spectral.operators import assemble
    from spectral.pseudospectrum import GridSpec, level_contours, scan
    from spectral.symbols import symbol_from_config

    op = assemble(symbol_from_config(symbol_tree), h, K)
    grid = GridSpec.from_config(grid_tree)
    field_ = scan(op, grid)
    contours = level_contours(field_, eps_list)
    return field_.to_frame(), eig(op.matrix).eigenvalues, contours, (grid.nx, grid.ny)


@st.cache_data(ttl=PERFORMANCE_CONFIG["cache_ttl"])
def compute_quasimode(symbol_tree, z, h):
    from spectral.operators import assemble
    from spectral.quasimode import build_quasimode, residual
    from spectral.symbols import Symbol1D, periodic_from_config

    g = periodic_from_config(symbol_tree)
    qm = build_quasimode(g, z, h)
    op = assemble(Symbol1D.first_order(g), h, qm.K)
    return qm.to_frame(), qm.x_plus, residual(op, qm)


def pseudospectrum_figure(frame, eigenvalues, contours, shape):
    nx, ny = shape
    log_smin = np.log10(np.maximum(frame["smin"].to_numpy(), 1e-300)).reshape(ny, nx)
    fig = go.Figure()
    fig.add_trace(go.Heatmap(
        x=frame["re"].to_numpy()[:nx],
        y=frame["im"].to_numpy()[::nx],
        z=log_smin,
        colorscale="Viridis",
        colorbar=dict(title="log10 s_min"),
    ))
    for eps, lines in contours.items():
        for k, line in enumerate(lines):
            fig.add_trace(go.Scatter(x=line.real, y=line.imag, mode="lines",
                                     line=dict(color="white", width=1),
                                     name=f"ε = {eps:g}", showlegend=k == 0))
    fig.add_trace(go.Scatter(x=eigenvalues.real, y=eigenvalues.imag, mode="markers",
                             marker=dict(color=COLORS["secondary"], size=5), name="eigenvalues"))
    fig.update_layout(height=520, xaxis_title="Re z", yaxis_title="Im z",
                      yaxis=dict(scaleanchor="x"))
    return fig


def render_pseudospectrum(params):
    """Pseudospectrum map with level contours and the spectrum"""
    st.subheader("🗺️ Pseudospectrum")
    try:
        frame, eigenvalues, contours, shape = compute_pseudospectrum(
            params["symbol"], params["h"], params["K"], params["grid"], params["eps_list"])
    except Exception as e:
        st.error(f"Pseudospectrum failed: {str(e)}")
        return
    st.plotly_chart(pseudospectrum_figure(frame, eigenvalues, contours, shape), use_container_width=True)
    col1, col2, col3 = st.columns(3)
    col1.metric("Nodes", len(frame))
    col2.metric("min s_min", f"{frame['smin'].min():.2e}")
    col3.metric("Eigenvalues", len(eigenvalues))
    st.download_button("Download CSV", frame.to_csv(index=False, float_format="%.17g"),
                       file_name="pseudospec.csv", mime="text/csv")


def render_quasimode(params):
    """WKB quasimode profile at a chosen interior point"""
    st.subheader("〰️ Quasimode")
    col1, col2 = st.columns(2)
    with col1:
        re_z = st.number_input("Re z", value=0.0, step=0.1)
    with col2:
        im_z = st.number_input("Im z", value=0.5, step=0.1)
    try:
        frame, x_plus, res = compute_quasimode(params["symbol"], complex(re_z, im_z), params["h"])
    except Exception as e:
        st.error(f"Quasimode failed: {str(e)}")
        return
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=frame["x"], y=frame["abs"], name="|e|", line=dict(color=COLORS["primary"])))
    fig.add_trace(go.Scatter(x=frame["x"], y=frame["re"], name="Re e", line=dict(dash="dot", color=COLORS["success"])))
    fig.add_vline(x=x_plus, line_dash="dash", annotation_text="x₊")
    fig.update_layout(height=380, xaxis_title="x")
    st.plotly_chart(fig, use_container_width=True)
    st.metric("Residual ‖(P − z)e‖", f"{res:.3e}")
