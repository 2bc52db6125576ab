import * as echarts from 'echarts';
import type { EChartsOption } from 'echarts';

import { Table } from './csv';
import { Snapshot } from './snapshot';

const WIDTH = 900;
const HEIGHT = 620;

/** Render an option to a standalone SVG string (no DOM, no timestamps). */
export function renderSvg(option: EChartsOption, width = WIDTH, height = HEIGHT): string {
  const chart = echarts.init(null, null, { renderer: 'svg', ssr: true, width, height });
  chart.setOption({ animation: false, ...option });
  const svg = chart.renderToSVGString();
  chart.dispose();
  return svg;
}

function leastSquaresSlope(x: number[], y: number[]): number {
  const n = x.length;
  const xb = x.reduce((a, b) => a + b, 0) / n;
  const yb = y.reduce((a, b) => a + b, 0) / n;
  let sxy = 0;
  let sxx = 0;
  for (let i = 0; i < n; i++) {
    sxy += (x[i] - xb) * (y[i] - yb);
    sxx += (x[i] - xb) * (x[i] - xb);
  }
  return sxy / sxx;
}

/** Log-log error-vs-lambda curves from the sweep summary, with the empirical
 *  slope annotated when there are at least two points. */
export function convergenceOption(summary: Table): EChartsOption {
  const lambdas = summary.rows.map((r) => r[0]);
  const eu = summary.rows.map((r) => r[1]);
  const ev = summary.rows.map((r) => r[2]);
  const option: EChartsOption = {
    title: { text: 'Relaxation-limit convergence', left: 'center' },
    legend: { bottom: 0 },
    xAxis: { type: 'log', name: 'lambda' },
    yAxis: { type: 'log', name: 'E(lambda)' },
    series: [
      {
        name: 'E_u',
        type: 'line',
        symbolSize: 8,
        data: lambdas.map((l, i) => [l, eu[i]]),
      },
      {
        name: 'E_v',
        type: 'line',
        symbolSize: 8,
        data: lambdas.map((l, i) => [l, ev[i]]),
      },
    ],
  };
  if (summary.rows.length >= 2) {
    const lx = lambdas.map(Math.log10);
    const su = leastSquaresSlope(lx, eu.map(Math.log10));
    const sv = leastSquaresSlope(lx, ev.map(Math.log10));
    option.graphic = [
      {
        type: 'text',
        right: 80,
        top: 60,
        style: {
          text: `slope E_u ~ ${su.toFixed(3)}\nslope E_v ~ ${sv.toFixed(3)}`,
          font: '14px sans-serif',
        },
      },
    ];
  }
  return option;
}

/** Four-panel time series: mass, min_v with the eta reference line, max_u,
 *  and the weighted functional. */
export function diagnosticsOption(diag: Table, eta: number): EChartsOption {
  const t = diag.rows.map((r) => r[0]);
  const col = (j: number) => diag.rows.map((r, i) => [t[i], r[j]] as [number, number]);
  const panels = [
    { name: 'mass', j: 1 },
    { name: 'min_v', j: 2 },
    { name: 'max_u', j: 3 },
    { name: 'lyapunov', j: 5 },
  ];
  const grids = [
    { left: '8%', right: '55%', top: '8%', bottom: '58%' },
    { left: '55%', right: '8%', top: '8%', bottom: '58%' },
    { left: '8%', right: '55%', top: '58%', bottom: '8%' },
    { left: '55%', right: '8%', top: '58%', bottom: '8%' },
  ];
  const option: EChartsOption = {
    title: panels.map((p, i) => ({
      text: p.name,
      textStyle: { fontSize: 13 },
      left: grids[i].left,
      top: i < 2 ? '1%' : '51%',
    })),
    grid: grids.map((g) => ({ ...g, containLabel: true })),
    xAxis: panels.map((_p, i) => ({ type: 'value', gridIndex: i, name: 't' })),
    yAxis: panels.map((_p, i) => ({ type: 'value', gridIndex: i, scale: true })),
    series: panels.map((p, i) => {
      const series: Record<string, unknown> = {
        name: p.name,
        type: 'line',
        showSymbol: false,
        xAxisIndex: i,
        yAxisIndex: i,
        data: col(p.j),
      };
      if (p.name === 'min_v') {
        series.markLine = {
          symbol: 'none',
          label: { formatter: `eta = ${eta}` },
          data: [{ yAxis: eta }],
          lineStyle: { type: 'dashed' },
        };
      }
      return series as never;
    }),
  };
  return option;
}

/** Heatmaps (2D) or profiles (1D) for each field section of a snapshot. */
export function heatmapOption(snap: Snapshot): EChartsOption {
  const names = Object.keys(snap.fields);
  if (snap.dim === 1) {
    const nx = snap.cells[0];
    const h = snap.spacing[0];
    const x = Array.from({ length: nx }, (_v, i) => (i + 0.5) * h);
    const grids = names.map((_n, i) => ({
      left: '10%',
      right: '6%',
      top: `${8 + (i * 84) / names.length}%`,
      height: `${70 / names.length}%`,
    }));
    return {
      title: names.map((n, i) => ({
        text: `${n}(x, t=${snap.t})`,
        textStyle: { fontSize: 13 },
        left: 'center',
        top: `${2 + (i * 84) / names.length}%`,
      })),
      grid: grids,
      xAxis: names.map((_n, i) => ({ type: 'value', gridIndex: i, name: 'x' })),
      yAxis: names.map((_n, i) => ({ type: 'value', gridIndex: i, scale: true })),
      series: names.map((n, i) => ({
        name: n,
        type: 'line',
        showSymbol: false,
        xAxisIndex: i,
        yAxisIndex: i,
        data: snap.fields[n].map((val, j) => [x[j], val]),
      })),
    };
  }
  const [nx, ny] = snap.cells;
  const grids = names.map((_n, i) => ({
    left: `${8 + i * 48}%`,
    width: '36%',
    top: '12%',
    bottom: '18%',
  }));
  return {
    title: names.map((n, i) => ({
      text: `${n}(x, y, t=${snap.t})`,
      textStyle: { fontSize: 13 },
      left: `${14 + i * 48}%`,
      top: '3%',
    })),
    grid: grids,
    xAxis: names.map((_n, i) => ({ type: 'category', gridIndex: i, name: 'ix' })),
    yAxis: names.map((_n, i) => ({ type: 'category', gridIndex: i, name: 'iy' })),
    visualMap: names.map((n, i) => {
      const values = snap.fields[n];
      return {
        min: Math.min(...values),
        max: Math.max(...values),
        seriesIndex: i,
        calculable: false,
        orient: 'horizontal',
        left: `${10 + i * 48}%`,
        bottom: '2%',
        itemWidth: 12,
        itemHeight: 90,
      };
    }) as never,
    series: names.map((n, i) => {
      const data: [number, number, number][] = [];
      for (let iy = 0; iy < ny; iy++) {
        for (let ix = 0; ix < nx; ix++) {
          data.push([ix, iy, snap.fields[n][iy * nx + ix]]);
        }
      }
      return {
        name: n,
        type: 'heatmap' as const,
        xAxisIndex: i,
        yAxisIndex: i,
        data,
        progressive: 0,
      };
    }),
  };
}
