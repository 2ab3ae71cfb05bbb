export * from './types';
export * from './api';
export * from './syncMatrix';
export * from './matrixView';
export * from './runView';
export * from './coaDashboard';
